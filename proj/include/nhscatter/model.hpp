#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/matrix.hpp"

namespace nhscatter {

enum class Side { Left, Right, Numbered };

/// A semi-infinite lead attached to one center site (0-based).
struct Port {
  std::size_t attach_site = 0;
  Side side = Side::Numbered;
  std::size_t number = 0; // only meaningful for Side::Numbered

  static Port left(std::size_t site) { return {site, Side::Left, 0}; }
  static Port right(std::size_t site) { return {site, Side::Right, 1}; }
  static Port numbered(std::size_t site, std::size_t p) { return {site, Side::Numbered, p}; }
};

inline std::string to_string(const Port& p) {
  switch (p.side) {
  case Side::Left: return "L";
  case Side::Right: return "R";
  case Side::Numbered: break;
  }
  return "P" + std::to_string(p.number);
}

/// Center Hamiltonian plus the leads attached to it. Leads are uniform chains
/// with hopping -J, connected to their site with the same -J.
class ScatteringSystem {
public:
  ScatteringSystem(ComplexMatrix center, std::vector<Port> ports, double lead_coupling = 1.0)
      : center_(std::move(center)), ports_(std::move(ports)), lead_coupling_(lead_coupling) {
    if (!center_.is_square()) throw InvalidArgument("ScatteringSystem: center must be square");
    if (ports_.empty()) throw InvalidArgument("ScatteringSystem: at least one port required");
    if (!(lead_coupling_ > 0.0) || !std::isfinite(lead_coupling_)) {
      throw InvalidArgument("ScatteringSystem: lead coupling J must be positive");
    }
    std::set<std::size_t> used;
    for (const auto& p : ports_) {
      if (p.attach_site >= center_.rows()) {
        throw InvalidArgument("ScatteringSystem: port site " + std::to_string(p.attach_site) +
                              " outside center of dimension " + std::to_string(center_.rows()));
      }
      if (!used.insert(p.attach_site).second) {
        throw InvalidArgument("ScatteringSystem: two ports share site " +
                              std::to_string(p.attach_site));
      }
    }
  }

  /// Left lead on `left_site`, right lead on `right_site`.
  static ScatteringSystem two_port(ComplexMatrix center, double j = 1.0,
                                   std::size_t left_site = 0, std::size_t right_site = 1) {
    return {std::move(center), {Port::left(left_site), Port::right(right_site)}, j};
  }

  /// Ports on the listed sites, labelled L/R when there are two, numbered otherwise.
  static ScatteringSystem with_sites(ComplexMatrix center, const std::vector<std::size_t>& sites,
                                     double j = 1.0) {
    std::vector<Port> ports;
    for (std::size_t p = 0; p < sites.size(); ++p) {
      if (sites.size() == 2) {
        ports.push_back(p == 0 ? Port::left(sites[p]) : Port::right(sites[p]));
      } else {
        ports.push_back(Port::numbered(sites[p], p));
      }
    }
    return {std::move(center), std::move(ports), j};
  }

  const ComplexMatrix& center() const noexcept { return center_; }
  const std::vector<Port>& ports() const noexcept { return ports_; }
  std::size_t port_count() const noexcept { return ports_.size(); }
  std::size_t dimension() const noexcept { return center_.rows(); }
  double lead_coupling() const noexcept { return lead_coupling_; }

  /// Same ports and leads around a different center of equal size.
  ScatteringSystem with_center(ComplexMatrix c) const {
    if (c.rows() != center_.rows() || !c.is_square()) {
      throw InvalidArgument("ScatteringSystem::with_center: dimension mismatch");
    }
    return {std::move(c), ports_, lead_coupling_};
  }

  ScatteringSystem daggered() const { return with_center(dagger(center_)); }

private:
  ComplexMatrix center_;
  std::vector<Port> ports_;
  double lead_coupling_;
};

enum class Prototype { Hc1, Hc2 };

/// The two anti-PT dimers:
///   Hc1 = [[-i g + V, -i g], [-i g, -i g - V]]   (common loss)
///   Hc2 = [[V, -i g], [-i g, -V]]
inline ComplexMatrix make_prototype(Prototype kind, double v, double gamma) {
  const cplx ig = I_unit * gamma;
  if (kind == Prototype::Hc1) return {{-ig + v, -ig}, {-ig, -ig - v}};
  return {{v, -ig}, {-ig, -v}};
}

struct ModeParameters {
  double k;
  double energy;
  double group_velocity;
};

inline void require_open_band(double k) {
  if (!(k > 0.0 && k < std::numbers::pi)) {
    throw BandEdge("wave vector k=" + std::to_string(k) + " outside the open interval (0, pi)");
  }
}

/// Lead dispersion E = -2J cos k, v_g = 2J sin k.
inline ModeParameters mode_params(double k, double j) {
  require_open_band(k);
  return {k, -2.0 * j * std::cos(k), 2.0 * j * std::sin(k)};
}

} // namespace nhscatter
