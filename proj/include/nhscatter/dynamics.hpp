#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/linalg.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/model.hpp"

namespace nhscatter {

/// Compressed-row sparse complex matrix for chain Hamiltonians.
class SparseMatrix {
public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    cplx value;
  };

  SparseMatrix() = default;

  /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
  SparseMatrix(std::size_t n, std::vector<Entry> entries) : n_(n), row_start_(n + 1, 0) {
    std::vector<std::vector<std::pair<std::size_t, cplx>>> rows(n);
    for (const auto& e : entries) {
      if (e.row >= n || e.col >= n) throw InvalidArgument("SparseMatrix: entry out of range");
      auto& row = rows[e.row];
      bool merged = false;
      for (auto& [c, v] : row) {
        if (c == e.col) {
          v += e.value;
          merged = true;
          break;
        }
      }
      if (!merged) row.emplace_back(e.col, e.value);
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (const auto& [c, v] : rows[r]) {
        if (v == cplx{}) continue;
        cols_.push_back(c);
        values_.push_back(v);
      }
      row_start_[r + 1] = cols_.size();
    }
  }

  static SparseMatrix from_dense(const ComplexMatrix& m) {
    if (!m.is_square()) throw InvalidArgument("SparseMatrix::from_dense: matrix must be square");
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(r, c) != cplx{}) entries.push_back({r, c, m(r, c)});
    return {m.rows(), std::move(entries)};
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  void multiply(std::span<const cplx> x, std::span<cplx> y) const {
    for (std::size_t r = 0; r < n_; ++r) {
      cplx s{};
      for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i) s += values_[i] * x[cols_[i]];
      y[r] = s;
    }
  }

  CVector operator*(std::span<const cplx> x) const {
    if (x.size() != n_) throw InvalidArgument("SparseMatrix: vector size mismatch");
    CVector y(n_);
    multiply(x, y);
    return y;
  }

  cplx at(std::size_t r, std::size_t c) const {
    for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i)
      if (cols_[i] == c) return values_[i];
    return {};
  }

  SparseMatrix adjoint() const {
    std::vector<Entry> entries;
    entries.reserve(values_.size());
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i)
        entries.push_back({cols_[i], r, std::conj(values_[i])});
    return {n_, std::move(entries)};
  }

  ComplexMatrix to_dense() const {
    ComplexMatrix m(n_, n_);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i) m(r, cols_[i]) = values_[i];
    return m;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> cols_;
  std::vector<cplx> values_;
};

/// Finite chain: left lead, center block, right lead (global order). Lead
/// sites carry the physical labels j = -left_len..-1 and 1..right_len.
struct ChainGeometry {
  std::size_t left_len = 0;
  std::size_t right_len = 0;
  std::size_t center_dim = 0;
  double j = 1.0;

  std::size_t total() const noexcept { return left_len + center_dim + right_len; }
  std::size_t center_begin() const noexcept { return left_len; }
  std::size_t right_begin() const noexcept { return left_len + center_dim; }

  std::size_t left_index(long label) const {
    if (label >= 0 || static_cast<std::size_t>(-label) > left_len) {
      throw InvalidArgument("left lead label out of range");
    }
    return static_cast<std::size_t>(static_cast<long>(left_len) + label);
  }
  std::size_t center_index(std::size_t site) const { return left_len + site; }
  std::size_t right_index(long label) const {
    if (label <= 0 || static_cast<std::size_t>(label) > right_len) {
      throw InvalidArgument("right lead label out of range");
    }
    return right_begin() + static_cast<std::size_t>(label) - 1;
  }

  enum class Region { Left, Center, Right };
  Region region(std::size_t g) const noexcept {
    if (g < left_len) return Region::Left;
    if (g < right_begin()) return Region::Center;
    return Region::Right;
  }

  /// Lead label for a global lead index; 0 is never a lead label.
  long label(std::size_t g) const noexcept {
    switch (region(g)) {
    case Region::Left: return static_cast<long>(g) - static_cast<long>(left_len);
    case Region::Right: return static_cast<long>(g - right_begin()) + 1;
    case Region::Center: break;
    }
    return 0;
  }
};

struct Chain {
  ChainGeometry geometry;
  SparseMatrix hamiltonian;
};

/// Embeds a center between two finite leads with hopping -J. The left lead
/// ends on `left_site`, the right lead on `right_site`; both may share a site
/// here (a plain chain segment). Open boundaries at both chain ends.
inline Chain build_chain(const ComplexMatrix& center, std::size_t left_site,
                         std::size_t right_site, double j, std::size_t left_len,
                         std::size_t right_len) {
  if (!center.is_square()) throw InvalidArgument("build_chain: center must be square");
  if (left_site >= center.rows() || right_site >= center.rows()) {
    throw InvalidArgument("build_chain: attach site outside the center");
  }
  if (!(j > 0.0)) throw InvalidArgument("build_chain: J must be positive");
  if (left_len < 1 || right_len < 1) {
    throw GeometryTooSmall("build_chain: each lead needs at least one site");
  }
  ChainGeometry geom{left_len, right_len, center.rows(), j};
  const cplx hop = -j;

  std::vector<SparseMatrix::Entry> entries;
  auto bond = [&](std::size_t a, std::size_t b) {
    entries.push_back({a, b, hop});
    entries.push_back({b, a, hop});
  };
  for (std::size_t g = 0; g + 1 < left_len; ++g) bond(g, g + 1);
  for (std::size_t g = geom.right_begin(); g + 1 < geom.total(); ++g) bond(g, g + 1);

  for (std::size_t r = 0; r < center.rows(); ++r)
    for (std::size_t c = 0; c < center.cols(); ++c)
      if (center(r, c) != cplx{})
        entries.push_back({geom.center_index(r), geom.center_index(c), center(r, c)});

  bond(geom.left_index(-1), geom.center_index(left_site));
  bond(geom.right_index(1), geom.center_index(right_site));

  return {geom, SparseMatrix(geom.total(), std::move(entries))};
}

/// Two-port system version: port 0 is the left lead, port 1 the right lead.
inline Chain build_chain(const ScatteringSystem& sys, std::size_t left_len, std::size_t right_len) {
  if (sys.port_count() != 2) throw NotTwoPort("build_chain: requires a two-port system");
  return build_chain(sys.center(), sys.ports()[0].attach_site, sys.ports()[1].attach_site,
                     sys.lead_coupling(), left_len, right_len);
}

struct PacketSpec {
  long n0 = -50;
  double sigma = 10.0;
  double k = std::numbers::pi / 2;
};

struct Packet {
  CVector psi;
  /// Actual squared norm; the amplitude uses Omega = sqrt(pi) sigma and is not renormalized.
  double norm2 = 0.0;
};

/// psi(j) = Omega^{-1/2} exp(-(j - n0)^2 / (2 sigma^2)) exp(i k j) on the left
/// lead; zero on the center and the right lead.
/// Every site with |j - n0| < 5 sigma must sit inside the left lead.
inline Packet gaussian_packet(const ChainGeometry& geom, const PacketSpec& spec) {
  if (!(spec.sigma > 0.0)) throw InvalidArgument("gaussian_packet: sigma must be positive");
  const double reach = 5.0 * spec.sigma;
  const double lo = static_cast<double>(spec.n0) - reach;
  const double hi = static_cast<double>(spec.n0) + reach;
  if (lo < -static_cast<double>(geom.left_len) - 1.0 || hi > 0.0) {
    throw PacketOutOfBounds("gaussian_packet: support [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "] leaves the left lead");
  }
  const double omega = std::sqrt(std::numbers::pi) * spec.sigma;
  const double amp = 1.0 / std::sqrt(omega);
  Packet out{CVector(geom.total()), 0.0};
  for (std::size_t g = 0; g < geom.total(); ++g) {
    if (geom.region(g) != ChainGeometry::Region::Left) continue;
    const double jj = static_cast<double>(geom.label(g));
    const double d = jj - static_cast<double>(spec.n0);
    out.psi[g] = amp * std::exp(-d * d / (2.0 * spec.sigma * spec.sigma)) *
                 std::exp(I_unit * (spec.k * jj));
    out.norm2 += std::norm(out.psi[g]);
  }
  return out;
}

struct Rk4Options {
  double dt = 0.02;
  double t_final = 0.0;
  std::size_t frames = 50;
  /// Propagation stops (trajectory flagged diverged) once |psi|^2 exceeds this.
  double norm2_cap = 1e12;
};

struct WaveTrajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::optional<ChainGeometry> geometry;
  std::optional<PacketSpec> packet;
  bool diverged = false;
};

namespace detail {

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

/// Classical RK4 stepper for i dpsi/dt = H psi with preallocated stages.
class Rk4Stepper {
public:
  explicit Rk4Stepper(const SparseMatrix& h)
      : h_(h), k1_(h.size()), k2_(h.size()), k3_(h.size()), k4_(h.size()), tmp_(h.size()) {}

  void step(CVector& psi, double dt) {
    const std::size_t n = psi.size();
    const cplx f = -I_unit;
    h_.multiply(psi, k1_);
    for (std::size_t i = 0; i < n; ++i) k1_[i] *= f;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = psi[i] + 0.5 * dt * k1_[i];
    h_.multiply(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) k2_[i] *= f;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = psi[i] + 0.5 * dt * k2_[i];
    h_.multiply(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) k3_[i] *= f;
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = psi[i] + dt * k3_[i];
    h_.multiply(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) k4_[i] *= f;
    for (std::size_t i = 0; i < n; ++i)
      psi[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

private:
  const SparseMatrix& h_;
  CVector k1_, k2_, k3_, k4_, tmp_;
};

/// Frame spacing and a step size no larger than dt that divides it evenly.
inline std::pair<double, std::size_t> frame_schedule(const Rk4Options& opt) {
  if (!(opt.dt > 0.0)) throw InvalidArgument("propagate: dt must be positive");
  if (!(opt.t_final > 0.0)) throw InvalidArgument("propagate: t_final must be positive");
  if (opt.frames == 0) throw InvalidArgument("propagate: need at least one frame");
  const double frame_dt = opt.t_final / static_cast<double>(opt.frames);
  const auto steps = static_cast<std::size_t>(std::ceil(frame_dt / opt.dt - 1e-9));
  return {frame_dt, std::max<std::size_t>(steps, 1)};
}

} // namespace detail

/// Integrates i dpsi/dt = H psi with classical RK4, recording frames at
/// t = i * t_final / frames (including t = 0).
inline WaveTrajectory propagate_rk4(const SparseMatrix& h, CVector psi0, const Rk4Options& opt) {
  if (psi0.size() != h.size()) throw InvalidArgument("propagate_rk4: state size mismatch");
  const auto [frame_dt, steps] = detail::frame_schedule(opt);
  const double dt = frame_dt / static_cast<double>(steps);

  WaveTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);
  detail::Rk4Stepper stepper(h);
  CVector psi = std::move(psi0);
  for (std::size_t f = 1; f <= opt.frames; ++f) {
    for (std::size_t s = 0; s < steps; ++s) stepper.step(psi, dt);
    traj.times.push_back(frame_dt * static_cast<double>(f));
    traj.states.push_back(psi);
    if (!(detail::norm2(psi) <= opt.norm2_cap)) {
      traj.diverged = true;
      break;
    }
  }
  return traj;
}

/// exp(-i H t) psi0 through the dense exponential (oracle sizes only).
inline CVector propagate_expm(const ComplexMatrix& h, std::span<const cplx> psi0, double t) {
  if (!h.is_square() || h.rows() != psi0.size()) {
    throw InvalidArgument("propagate_expm: size mismatch");
  }
  if (h.rows() > kExpmMaxDim) {
    throw DimensionTooLarge("propagate_expm: dimension above oracle cap");
  }
  return expm(h * cplx(0.0, -t)) * psi0;
}

struct RtSample {
  double t = 0.0;
  double reflection = 0.0;
  double transmission = 0.0;
  double center = 0.0;
};

struct RtMeasurement {
  double reflection = 0.0;
  double transmission = 0.0;
  double leak = 0.0;
  double boundary = 0.0;
};

namespace detail {
inline RtSample partial_sums(const ChainGeometry& geom, std::span<const cplx> psi, double t) {
  RtSample s{t, 0.0, 0.0, 0.0};
  for (std::size_t g = 0; g < psi.size(); ++g) {
    const double p = std::norm(psi[g]);
    switch (geom.region(g)) {
    case ChainGeometry::Region::Left: s.reflection += p; break;
    case ChainGeometry::Region::Center: s.center += p; break;
    case ChainGeometry::Region::Right: s.transmission += p; break;
    }
  }
  return s;
}

inline const ChainGeometry& require_geometry(const WaveTrajectory& traj) {
  if (!traj.geometry) throw InvalidArgument("trajectory carries no chain geometry");
  if (traj.states.empty()) throw InvalidArgument("trajectory is empty");
  return *traj.geometry;
}
} // namespace detail

inline constexpr std::size_t kBoundaryWindow = 10;
inline constexpr double kBoundaryRelTol = 1e-6;

/// Lead intensities at the final frame. Fails when the outer 10 sites at
/// either end hold more than 1e-6 of R + T, i.e. the packet reached a wall.
inline RtMeasurement measure_rt(const WaveTrajectory& traj) {
  const ChainGeometry& geom = detail::require_geometry(traj);
  const CVector& psi = traj.states.back();
  const RtSample s = detail::partial_sums(geom, psi, traj.times.back());

  double boundary = 0.0;
  const std::size_t n = psi.size();
  const std::size_t w = std::min(kBoundaryWindow, n / 2);
  for (std::size_t i = 0; i < w; ++i) boundary += std::norm(psi[i]) + std::norm(psi[n - 1 - i]);

  RtMeasurement m{s.reflection, s.transmission, s.center, boundary};
  if (!(boundary < kBoundaryRelTol * (s.reflection + s.transmission))) {
    throw BoundaryContamination("measure_rt: boundary occupancy " + std::to_string(boundary) +
                                " too large relative to R+T");
  }
  return m;
}

inline std::vector<RtSample> rt_series(const WaveTrajectory& traj) {
  const ChainGeometry& geom = detail::require_geometry(traj);
  std::vector<RtSample> out;
  out.reserve(traj.states.size());
  for (std::size_t f = 0; f < traj.states.size(); ++f) {
    out.push_back(detail::partial_sums(geom, traj.states[f], traj.times[f]));
  }
  return out;
}

struct OverlapSample {
  double t;
  cplx overlap;
};

/// Evolves psi under H and phi under H^dagger and records <phi(t)|psi(t)>,
/// which is conserved for any H.
inline std::vector<OverlapSample> biorthogonal_overlap_series(const SparseMatrix& h,
                                                              const CVector& psi0,
                                                              const CVector& phi0,
                                                              const Rk4Options& opt) {
  if (psi0.size() != h.size() || phi0.size() != h.size()) {
    throw InvalidArgument("biorthogonal_overlap_series: state size mismatch");
  }
  const SparseMatrix hd = h.adjoint();
  const WaveTrajectory a = propagate_rk4(h, psi0, opt);
  const WaveTrajectory b = propagate_rk4(hd, phi0, opt);
  const std::size_t frames = std::min(a.states.size(), b.states.size());
  std::vector<OverlapSample> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    cplx s{};
    for (std::size_t i = 0; i < h.size(); ++i) s += std::conj(b.states[f][i]) * a.states[f][i];
    out.push_back({a.times[f], s});
  }
  return out;
}

} // namespace nhscatter
