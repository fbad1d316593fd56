#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "nhscatter/error.hpp"
#include "nhscatter/linalg.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/model.hpp"

namespace nhscatter {

/// Reference plane for incoming/outgoing amplitudes.
///
/// Raw measures amplitudes at the attachment site itself (psi_center = 1 + r).
/// PaperPlane multiplies by the global phase e^{-2ik}, which places the
/// reflection and transmission in the closed forms used for the anti-PT
/// dimers. |r|^2, |t|^2 and every conservation residual are the same in both.
enum class Convention { Raw, PaperPlane };

inline std::string to_string(Convention c) {
  return c == Convention::Raw ? "raw" : "paper-plane";
}

/// P x P scattering matrix at wave vector k. Entry (p, q) is the outgoing
/// amplitude in port p for unit input in port q, so a two-port matrix reads
/// [[r_L, t_R], [t_L, r_R]].
struct ScatteringMatrix {
  double k = 0.0;
  ComplexMatrix entries{1, 1};
  Convention convention = Convention::PaperPlane;

  std::size_t ports() const noexcept { return entries.rows(); }

  cplx r_left() const { return entries(0, 0); }
  cplx t_left() const { return entries(1, 0); }
  cplx r_right() const { return entries(1, 1); }
  cplx t_right() const { return entries(0, 1); }
};

/// Reflection/transmission pair for a symmetric two-port.
struct ReflTrans {
  cplx r;
  cplx t;
};

/// Boundary term replacing a semi-infinite lead of hopping -J at E = -2J cos k.
inline cplx self_energy(double k, double j) {
  require_open_band(k);
  return -j * std::exp(I_unit * k);
}

/// Lead-eliminated scattering matrix:
///   G = (E - H_c - Sigma W W^T)^{-1},  S = -1 + 2iJ sin k W^T G W.
inline ScatteringMatrix scattering_matrix(const ScatteringSystem& sys, double k,
                                          Convention convention = Convention::PaperPlane) {
  const double j = sys.lead_coupling();
  const ModeParameters mode = mode_params(k, j);
  const cplx sigma = self_energy(k, j);
  const std::size_t n = sys.dimension();
  const std::size_t p = sys.port_count();

  ComplexMatrix a = -sys.center();
  for (std::size_t i = 0; i < n; ++i) a(i, i) += mode.energy;
  for (const auto& port : sys.ports()) a(port.attach_site, port.attach_site) -= sigma;

  // Only the port columns of G are needed.
  ComplexMatrix w(n, p);
  for (std::size_t q = 0; q < p; ++q) w(sys.ports()[q].attach_site, q) = 1.0;

  ComplexMatrix gw(n, p);
  try {
    gw = solve_linear(a, w);
  } catch (const SingularMatrix&) {
    throw ScatteringSingularity("scattering singularity at k=" + std::to_string(k) +
                                ": E - H_c - Sigma is singular");
  }

  const cplx prefactor = 2.0 * I_unit * j * std::sin(k);
  const cplx phase = convention == Convention::PaperPlane ? std::exp(-2.0 * I_unit * k) : 1.0;
  ComplexMatrix s(p, p);
  for (std::size_t row = 0; row < p; ++row) {
    for (std::size_t col = 0; col < p; ++col) {
      cplx v = prefactor * gw(sys.ports()[row].attach_site, col);
      if (row == col) v -= 1.0;
      s(row, col) = v * phase;
    }
  }
  return {k, std::move(s), convention};
}

namespace detail {
inline cplx checked_ratio(cplx num, cplx den, double scale, const char* who) {
  if (std::abs(den) <= 1e-14 * scale) {
    throw ScatteringSingularity(std::string(who) + ": vanishing denominator");
  }
  return num / den;
}
} // namespace detail

/// Closed form for Hc1 at V = 0.
inline ReflTrans closed_form_hc1(double k, double gamma, double j) {
  require_open_band(k);
  const cplx den = I_unit * j + 2.0 * gamma * std::exp(I_unit * k);
  const double scale = std::abs(j) + 2.0 * std::abs(gamma);
  return {detail::checked_ratio(-(I_unit * j + 2.0 * gamma * std::cos(k)), den, scale, "hc1"),
          detail::checked_ratio(2.0 * I_unit * gamma * std::sin(k), den, scale, "hc1")};
}

/// Closed form for Hc2 at V = 0.
inline ReflTrans closed_form_hc2(double k, double gamma, double j) {
  require_open_band(k);
  const cplx den = j * j + gamma * gamma * std::exp(2.0 * I_unit * k);
  const double scale = j * j + gamma * gamma;
  return {detail::checked_ratio(-(j * j + gamma * gamma), den, scale, "hc2"),
          detail::checked_ratio(2.0 * j * gamma * std::sin(k), den, scale, "hc2")};
}

} // namespace nhscatter
