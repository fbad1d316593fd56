#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/smatrix.hpp"

namespace nhscatter {

inline constexpr double kDefaultFluxTol = 1e-9;

enum class FluxClass { EnergyConserving, EnergyDifferenceConserving, Neither };

inline std::string to_string(FluxClass c) {
  switch (c) {
  case FluxClass::EnergyConserving: return "energy-conserving";
  case FluxClass::EnergyDifferenceConserving: return "energy-difference";
  case FluxClass::Neither: break;
  }
  return "neither";
}

struct OffDiagonalResidual {
  std::size_t row;
  std::size_t col;
  cplx value;
};

struct ConservationReport {
  double k = 0.0;
  /// || S_bar^dagger S - I ||_F
  double law_residual = 0.0;
  /// (S_bar^dagger S)_pp - 1 for every port p.
  std::vector<cplx> diag_residuals;
  std::vector<OffDiagonalResidual> offdiag_residuals;
  FluxClass flux_class = FluxClass::Neither;
  double flux_residual = 0.0;
};

/// Checks S^dagger(H^dagger) S(H) = I. For two ports the diagonal reads
/// conj(rb_L) r_L + conj(tb_L) t_L = 1 and the off-diagonal
/// conj(tb_R) r_L + conj(rb_R) t_L = 0 (plus the mirror).
/// `s` must come from H_c and `s_bar` from dagger(H_c) with the same ports.
inline ConservationReport verify_conservation_law(const ScatteringMatrix& s,
                                                  const ScatteringMatrix& s_bar,
                                                  double flux_tol = kDefaultFluxTol);

struct FluxVerdict {
  FluxClass flux_class;
  double residual;
};

/// |r|^2 + |t|^2 = 1 (energy) versus |r|^2 - |t|^2 = 1 (energy difference),
/// worst case over both input ports.
inline FluxVerdict classify_flux(const ScatteringMatrix& s, double tol = kDefaultFluxTol) {
  if (s.ports() != 2) throw NotTwoPort("classify_flux: requires a two-port scattering matrix");
  double sum_dev = 0.0;
  double diff_dev = 0.0;
  for (std::size_t in = 0; in < 2; ++in) {
    const double r2 = std::norm(s.entries(in, in));
    const double t2 = std::norm(s.entries(1 - in, in));
    sum_dev = std::max(sum_dev, std::abs(r2 + t2 - 1.0));
    diff_dev = std::max(diff_dev, std::abs(r2 - t2 - 1.0));
  }
  const double best = std::min(sum_dev, diff_dev);
  if (sum_dev < tol) return {FluxClass::EnergyConserving, best};
  if (diff_dev < tol) return {FluxClass::EnergyDifferenceConserving, best};
  return {FluxClass::Neither, best};
}

inline ConservationReport verify_conservation_law(const ScatteringMatrix& s,
                                                  const ScatteringMatrix& s_bar,
                                                  double flux_tol) {
  if (s.convention != s_bar.convention) {
    throw ConventionMismatch("verify_conservation_law: S and S_bar use different conventions");
  }
  if (s.k != s_bar.k) throw KMismatch("verify_conservation_law: S and S_bar differ in k");
  if (s.ports() != s_bar.ports()) {
    throw InvalidArgument("verify_conservation_law: port counts differ");
  }

  const std::size_t p = s.ports();
  ComplexMatrix deviation = s_bar.entries.adjoint() * s.entries - ComplexMatrix::identity(p);

  ConservationReport rep;
  rep.k = s.k;
  rep.law_residual = deviation.frobenius_norm();
  for (std::size_t i = 0; i < p; ++i) {
    rep.diag_residuals.push_back(deviation(i, i));
    for (std::size_t j = 0; j < p; ++j) {
      if (i != j) rep.offdiag_residuals.push_back({i, j, deviation(i, j)});
    }
  }
  if (p == 2) {
    const auto verdict = classify_flux(s, flux_tol);
    rep.flux_class = verdict.flux_class;
    rep.flux_residual = verdict.residual;
  } else {
    rep.flux_class = FluxClass::Neither;
    rep.flux_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

} // namespace nhscatter
