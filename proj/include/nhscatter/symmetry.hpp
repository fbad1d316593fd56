#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/linalg.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/conservation.hpp"
#include "nhscatter/smatrix.hpp"

namespace nhscatter {

/// Null-space threshold for the metric equations, relative to the largest coefficient.
inline constexpr double kMetricNullTol = 1e-9;
/// q counts as invertible when |det q| > kMetricDetTol * (max |q_ij|)^N.
inline constexpr double kMetricDetTol = 1e-9;
inline constexpr std::size_t kMetricMaxDim = 8;

struct PortSignature {
  int s_m = 1;
  int s_n = 1;
  int product() const noexcept { return s_m * s_n; }
};

/// Hermitian q with q H^dagger = H q for some source H.
struct MetricOperator {
  ComplexMatrix q;
  bool invertible = false;
  std::optional<PortSignature> port_signature;
};

inline bool metric_is_invertible(const ComplexMatrix& q) {
  const double scale = q.max_abs();
  if (scale == 0.0) return false;
  return std::abs(determinant(q)) > kMetricDetTol * std::pow(scale, static_cast<double>(q.rows()));
}

namespace detail {

// Real coordinates of a Hermitian N x N matrix: N diagonal entries, then
// (Re, Im) of each upper-triangular entry in row-major order.
inline std::size_t hermitian_param_count(std::size_t n) { return n * n; }

inline ComplexMatrix hermitian_from_params(std::size_t n, std::span<const double> x) {
  ComplexMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = x[i];
  std::size_t idx = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z{x[idx], x[idx + 1]};
      q(i, j) = z;
      q(j, i) = std::conj(z);
      idx += 2;
    }
  }
  return q;
}

inline std::vector<double> unit_params(std::size_t count, std::size_t which) {
  std::vector<double> e(count, 0.0);
  e[which] = 1.0;
  return e;
}

// Real-scaled so the largest entry has modulus 1 and the first nonzero entry
// (row-major) has positive real part, or positive imaginary part if purely
// imaginary. Only real scalars keep q Hermitian.
inline ComplexMatrix canonicalize(ComplexMatrix q) {
  const double scale = q.max_abs();
  if (scale == 0.0) return q;
  q *= 1.0 / scale;
  for (const auto& z : q.data()) {
    if (std::abs(z) <= 1e-12) continue;
    const bool flip = std::abs(z.real()) > 1e-12 ? z.real() < 0.0 : z.imag() < 0.0;
    if (flip) q *= -1.0;
    break;
  }
  return q;
}

} // namespace detail

/// Basis of the real vector space of Hermitian q solving q H^dagger = H q,
/// each element canonicalized and tagged invertible or singular. An empty
/// result means only q = 0 solves.
inline std::vector<MetricOperator> metric_space(const ComplexMatrix& h,
                                                double rel_tol = kMetricNullTol) {
  if (!h.is_square()) throw InvalidArgument("metric_space: H must be square");
  const std::size_t n = h.rows();
  if (n > kMetricMaxDim) {
    throw DimensionTooLarge("metric_space: dimension above " + std::to_string(kMetricMaxDim));
  }
  const std::size_t unknowns = detail::hermitian_param_count(n);
  const ComplexMatrix hd = h.adjoint();

  RealMatrix system(2 * n * n, unknowns);
  for (std::size_t u = 0; u < unknowns; ++u) {
    const ComplexMatrix b = detail::hermitian_from_params(n, detail::unit_params(unknowns, u));
    const ComplexMatrix image = b * hd - h * b;
    for (std::size_t e = 0; e < n * n; ++e) {
      system(2 * e, u) = image.data()[e].real();
      system(2 * e + 1, u) = image.data()[e].imag();
    }
  }

  std::vector<MetricOperator> basis;
  for (const auto& x : null_space(std::move(system), rel_tol)) {
    ComplexMatrix q = detail::canonicalize(detail::hermitian_from_params(n, x));
    const bool inv = metric_is_invertible(q);
    basis.push_back({std::move(q), inv, std::nullopt});
  }
  return basis;
}

/// Checks the port conditions: row/column m of q is the m-th unit vector and
/// row/column n is +/- the n-th unit vector. Throws ConditionFailed with the
/// first offending entry otherwise.
inline PortSignature port_signature(const ComplexMatrix& q, std::size_t m, std::size_t n,
                                    double tol = 1e-10) {
  const std::size_t dim = q.rows();
  if (!q.is_square()) throw InvalidArgument("port_signature: q must be square");
  if (m == n || m >= dim || n >= dim) {
    throw InvalidArgument("port_signature: sites must be distinct and inside the center");
  }
  const int s_n = q(n, n).real() < 0.0 ? -1 : 1;
  auto expect = [&](std::size_t r, std::size_t c, cplx want) {
    if (std::abs(q(r, c) - want) > tol) {
      throw ConditionFailed(r, c,
                            "port condition fails at q(" + std::to_string(r) + "," +
                                std::to_string(c) + ")");
    }
  };
  for (std::size_t j = 0; j < dim; ++j) {
    const cplx want_m = j == m ? 1.0 : 0.0;
    expect(m, j, want_m);
    expect(j, m, want_m);
    const cplx want_n = j == n ? static_cast<double>(s_n) : 0.0;
    expect(n, j, want_n);
    expect(j, n, want_n);
  }
  return {1, s_n};
}

inline PortSignature port_signature(const MetricOperator& q, std::size_t m, std::size_t n,
                                    double tol = 1e-10) {
  return port_signature(q.q, m, n, tol);
}

/// Searches the span of a metric basis for an invertible q meeting the port
/// conditions at (m, n). Returns one metric per achievable sign of q_nn,
/// positive sign first.
inline std::vector<MetricOperator> find_port_metrics(const std::vector<MetricOperator>& basis,
                                                     std::size_t m, std::size_t n,
                                                     double tol = 1e-10) {
  std::vector<MetricOperator> found;
  if (basis.empty()) return found;
  const std::size_t dim = basis.front().q.rows();
  if (m == n || m >= dim || n >= dim) {
    throw InvalidArgument("find_port_metrics: sites must be distinct and inside the center");
  }
  const std::size_t d = basis.size();

  // Rows m and n fix every constrained entry; Hermiticity covers the columns.
  RealMatrix a(4 * dim, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      a(4 * j + 0, i) = basis[i].q(m, j).real();
      a(4 * j + 1, i) = basis[i].q(m, j).imag();
      a(4 * j + 2, i) = basis[i].q(n, j).real();
      a(4 * j + 3, i) = basis[i].q(n, j).imag();
    }
  }
  const auto homogeneous = null_space(a, kMetricNullTol);

  for (int sign : {1, -1}) {
    std::vector<double> b(4 * dim, 0.0);
    b[4 * m + 0] = 1.0;
    b[4 * n + 2] = static_cast<double>(sign);
    const auto particular = solve_real_affine(a, b, kMetricNullTol);
    if (!particular) continue;

    auto combine = [&](const std::vector<double>& c) {
      ComplexMatrix q(dim, dim);
      for (std::size_t i = 0; i < d; ++i) q += basis[i].q * cplx(c[i]);
      return q;
    };

    std::vector<std::vector<double>> candidates{*particular};
    for (const auto& h : homogeneous) {
      auto c = *particular;
      for (std::size_t i = 0; i < d; ++i) c[i] += h[i];
      candidates.push_back(std::move(c));
    }
    for (const auto& c : candidates) {
      ComplexMatrix q = combine(c);
      if (!metric_is_invertible(q)) continue;
      try {
        const PortSignature sig = port_signature(q, m, n, tol);
        found.push_back({std::move(q), true, sig});
        break;
      } catch (const ConditionFailed&) {
      }
    }
  }
  return found;
}

/// True iff P conj(H) P^{-1} = -H within tol.
inline bool is_anti_pt(const ComplexMatrix& h, const ComplexMatrix& p, double tol = 1e-10) {
  if (!h.is_square() || p.rows() != h.rows() || !p.is_square()) {
    throw InvalidArgument("is_anti_pt: H and P must be square of equal size");
  }
  const ComplexMatrix transformed = p * h.conj() * invert(p);
  return (transformed + h).frobenius_norm() < tol;
}

enum class PhaseClass { ExactAntiPT, ExceptionalPoint, BrokenAntiPT };

inline std::string to_string(PhaseClass c) {
  switch (c) {
  case PhaseClass::ExactAntiPT: return "exact";
  case PhaseClass::ExceptionalPoint: return "exceptional-point";
  case PhaseClass::BrokenAntiPT: return "broken";
  }
  return "broken";
}

/// Exact anti-PT phase for |V| < |gamma|, broken for |V| > |gamma|.
inline PhaseClass phase_of(double v, double gamma) {
  const double a = std::abs(v);
  const double b = std::abs(gamma);
  if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return PhaseClass::ExceptionalPoint;
  return a < b ? PhaseClass::ExactAntiPT : PhaseClass::BrokenAntiPT;
}

/// S(H^dagger) implied by a port-conditioned metric: diag(s) S diag(s)^{-1},
/// so reflections are unchanged and transmissions pick up s_m s_n.
inline ScatteringMatrix predict_conjugate_smatrix(const ScatteringMatrix& s, PortSignature sig) {
  if (s.ports() != 2) throw NotTwoPort("predict_conjugate_smatrix: requires two ports");
  ScatteringMatrix out = s;
  const double sign = static_cast<double>(sig.product());
  out.entries(0, 1) *= sign;
  out.entries(1, 0) *= sign;
  return out;
}

inline FluxClass predicted_flux_class(const std::optional<PortSignature>& sig) {
  if (!sig) return FluxClass::Neither;
  return sig->product() > 0 ? FluxClass::EnergyConserving
                            : FluxClass::EnergyDifferenceConserving;
}

} // namespace nhscatter
