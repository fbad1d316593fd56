#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/linalg.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/symmetry.hpp"

namespace nhscatter {

/// Mode-channel coupling D (N modes x P channels) and the input frequency.
struct CmtCoupling {
  ComplexMatrix d;
  double omega = 0.0;
};

/// Port-aligned two-channel coupling: channel 0 couples only to mode m with
/// sqrt(kappa_m), channel 1 only to mode n with sqrt(kappa_n).
inline ComplexMatrix aligned_coupling(std::size_t modes, std::size_t m, std::size_t n,
                                      double kappa_m, double kappa_n) {
  if (m >= modes || n >= modes || m == n) {
    throw InvalidArgument("aligned_coupling: mode indices must be distinct and in range");
  }
  if (!(kappa_m > 0.0) || !(kappa_n > 0.0)) {
    throw InvalidArgument("aligned_coupling: decay rates must be positive");
  }
  ComplexMatrix d(modes, 2);
  d(m, 0) = std::sqrt(kappa_m);
  d(n, 1) = std::sqrt(kappa_n);
  return d;
}

/// S(omega) = I - 2i D^dagger (omega - H_c + i D D^dagger)^{-1} D.
inline ComplexMatrix cmt_smatrix(const ComplexMatrix& h, const CmtCoupling& coupling) {
  const ComplexMatrix& d = coupling.d;
  if (!h.is_square() || d.rows() != h.rows()) {
    throw InvalidArgument("cmt_smatrix: D must have one row per mode of H_c");
  }
  const std::size_t n = h.rows();
  const ComplexMatrix dd = d.adjoint();
  ComplexMatrix a = -h + I_unit * (d * dd);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += coupling.omega;
  ComplexMatrix x(1, 1);
  try {
    x = solve_linear(a, d);
  } catch (const SingularMatrix&) {
    throw SingularMatrix("cmt_smatrix: scattering singularity at omega=" +
                         std::to_string(coupling.omega));
  }
  return ComplexMatrix::identity(d.cols()) - (2.0 * I_unit) * (dd * x);
}

struct CmtResiduals {
  /// || S(H^dagger) - diag(q_mm, q_nn) S(H) diag(q_mm, q_nn)^{-1} ||_F
  double relation = 0.0;
  /// || S^dagger(H^dagger) S(H) - I ||_F
  double law = 0.0;
};

/// Conservation law in the CMT formalism. Always defined.
inline double cmt_law_residual(const ComplexMatrix& h, const CmtCoupling& coupling) {
  const ComplexMatrix s = cmt_smatrix(h, coupling);
  const ComplexMatrix s_bar = cmt_smatrix(h.adjoint(), coupling);
  return (s_bar.adjoint() * s - ComplexMatrix::identity(s.rows())).frobenius_norm();
}

/// Checks the metric-induced relation between S(H) and S(H^dagger) together
/// with the universal law. q must satisfy the port conditions at (m, n). The premises q D D^dagger q^{-1} = D D^dagger and
/// q D = D diag(q_mm, q_nn) are verified first; PremiseViolated names the
/// one that fails. The metric itself is not required to be a symmetry of H:
/// for a non-pseudo-Hermitian H the relation residual is simply large.
inline CmtResiduals verify_cmt_relations(const ComplexMatrix& h, const CmtCoupling& coupling,
                                         const ComplexMatrix& q, std::size_t m, std::size_t n,
                                         double premise_tol = 1e-10) {
  const ComplexMatrix& d = coupling.d;
  if (d.cols() != 2) throw NotTwoPort("verify_cmt_relations: requires two channels");
  if (!q.is_square() || q.rows() != h.rows()) {
    throw InvalidArgument("verify_cmt_relations: q must match H_c");
  }
  if (m >= q.rows() || n >= q.rows() || m == n) {
    throw InvalidArgument("verify_cmt_relations: port sites must be distinct and in range");
  }
  port_signature(q, m, n);

  const ComplexMatrix ddd = d * d.adjoint();
  const double scale = std::max(1.0, ddd.max_abs());
  const ComplexMatrix q_inv = invert(q);
  if ((q * ddd * q_inv - ddd).frobenius_norm() > premise_tol * scale) {
    throw PremiseViolated("verify_cmt_relations: q D D^dagger q^{-1} != D D^dagger");
  }
  const cplx port_diag[2] = {q(m, m), q(n, n)};
  const ComplexMatrix qp = ComplexMatrix::diagonal(port_diag);
  if ((q * d - d * qp).frobenius_norm() > premise_tol * std::max(1.0, d.max_abs())) {
    throw PremiseViolated("verify_cmt_relations: q D != D diag(q_mm, q_nn)");
  }

  const ComplexMatrix s = cmt_smatrix(h, coupling);
  const ComplexMatrix s_bar = cmt_smatrix(h.adjoint(), coupling);
  CmtResiduals r;
  r.relation = (s_bar - qp * s * invert(qp)).frobenius_norm();
  r.law = (s_bar.adjoint() * s - ComplexMatrix::identity(2)).frobenius_norm();
  return r;
}

} // namespace nhscatter
