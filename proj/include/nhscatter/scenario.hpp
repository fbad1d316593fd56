#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "nhscatter/cmt.hpp"
#include "nhscatter/conservation.hpp"
#include "nhscatter/dynamics.hpp"
#include "nhscatter/error.hpp"
#include "nhscatter/io.hpp"
#include "nhscatter/linalg.hpp"
#include "nhscatter/matrix.hpp"
#include "nhscatter/model.hpp"
#include "nhscatter/parallel.hpp"
#include "nhscatter/random.hpp"
#include "nhscatter/smatrix.hpp"
#include "nhscatter/symmetry.hpp"

namespace nhscatter {

/// Everything a CLI run needs. Field names double as JSON config keys.
struct ScenarioConfig {
  std::string subcommand;

  // Center source: prototype XOR matrix file.
  std::optional<std::string> prototype; // "hc1" | "hc2"
  double v = 0.0;
  double gamma = 1.0 / 3.0;
  std::optional<std::string> matrix_file;
  bool dagger = false; // use H_c^dagger instead of H_c

  std::vector<std::size_t> ports{0, 1};
  double j = 1.0;

  std::optional<double> k;
  double k_min = 0.05;
  double k_max = std::numbers::pi - 0.05;
  std::size_t k_count = 200;
  Convention convention = Convention::PaperPlane;
  double tol = kDefaultFluxTol;

  // evolve
  std::size_t left_len = 300;
  std::size_t right_len = 300;
  long n0 = -50;
  double sigma = 10.0;
  double dt = 0.02;
  std::optional<double> t_final;
  std::size_t frames = 50;

  // classify
  std::optional<std::string> permutation_file;

  // cmt
  std::optional<std::string> coupling_file;
  double kappa_m = 1.0;
  double kappa_n = 1.0;
  std::optional<double> omega;
  double omega_min = -3.0; // units of max |H_c| entry
  double omega_max = 3.0;
  std::size_t omega_count = 121;
  std::optional<std::string> metric_file;

  // campaign
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  double campaign_threshold = 1e-8;

  std::string output;         // primary output path, empty = stdout
  std::string summary_output; // evolve summary JSON path, empty = stdout
  std::size_t workers = 0;    // 0 = hardware concurrency
};

namespace detail {
template <typename T> struct is_optional : std::false_type {};
template <typename T> struct is_optional<std::optional<T>> : std::true_type {};
} // namespace detail

inline const char* convention_key(Convention c) { return c == Convention::Raw ? "raw" : "paper"; }

inline Convention parse_convention(const std::string& s) {
  if (s == "raw") return Convention::Raw;
  if (s == "paper" || s == "paper-plane") return Convention::PaperPlane;
  throw ConfigError("convention: expected 'raw' or 'paper', got '" + s + "'");
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["subcommand"] = c.subcommand;
  if (c.prototype) {
    j["prototype"] = *c.prototype;
    j["v"] = c.v;
    j["gamma"] = c.gamma;
  }
  if (c.matrix_file) j["matrix_file"] = *c.matrix_file;
  j["dagger"] = c.dagger;
  j["ports"] = c.ports;
  j["j"] = c.j;
  if (c.k) j["k"] = *c.k;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["k_count"] = c.k_count;
  j["convention"] = convention_key(c.convention);
  j["tol"] = c.tol;
  j["left_len"] = c.left_len;
  j["right_len"] = c.right_len;
  j["n0"] = c.n0;
  j["sigma"] = c.sigma;
  j["dt"] = c.dt;
  if (c.t_final) j["t_final"] = *c.t_final;
  j["frames"] = c.frames;
  if (c.permutation_file) j["permutation_file"] = *c.permutation_file;
  if (c.coupling_file) j["coupling_file"] = *c.coupling_file;
  j["kappa_m"] = c.kappa_m;
  j["kappa_n"] = c.kappa_n;
  if (c.omega) j["omega"] = *c.omega;
  j["omega_min"] = c.omega_min;
  j["omega_max"] = c.omega_max;
  j["omega_count"] = c.omega_count;
  if (c.metric_file) j["metric_file"] = *c.metric_file;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["campaign_threshold"] = c.campaign_threshold;
  return j;
}

/// Reads a config object; unknown keys are rejected so typos surface.
inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ScenarioConfig c;
  static const std::vector<std::string> known = {
      "subcommand", "prototype", "v", "gamma", "matrix_file", "dagger", "ports", "j", "k",
      "k_min", "k_max", "k_count", "convention", "tol", "left_len", "right_len", "n0", "sigma",
      "dt", "t_final", "frames", "permutation_file", "coupling_file", "kappa_m", "kappa_n",
      "omega", "omega_min", "omega_max", "omega_count", "metric_file", "seed", "trials",
      "campaign_threshold", "output", "summary_output", "workers"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config: unknown field '" + key + "'");
    }
  }
  auto field = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      using T = std::remove_reference_t<decltype(target)>;
      if constexpr (detail::is_optional<T>::value) {
        target = j.at(key).get<typename T::value_type>();
      } else {
        target = j.at(key).get<T>();
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
    }
  };
  field("subcommand", c.subcommand);
  field("prototype", c.prototype);
  field("v", c.v);
  field("gamma", c.gamma);
  field("matrix_file", c.matrix_file);
  field("dagger", c.dagger);
  field("ports", c.ports);
  field("j", c.j);
  field("k", c.k);
  field("k_min", c.k_min);
  field("k_max", c.k_max);
  field("k_count", c.k_count);
  if (j.contains("convention")) {
    if (!j.at("convention").is_string()) throw ConfigError("config: 'convention' must be a string");
    c.convention = parse_convention(j.at("convention").get<std::string>());
  }
  field("tol", c.tol);
  field("left_len", c.left_len);
  field("right_len", c.right_len);
  field("n0", c.n0);
  field("sigma", c.sigma);
  field("dt", c.dt);
  field("t_final", c.t_final);
  field("frames", c.frames);
  field("permutation_file", c.permutation_file);
  field("coupling_file", c.coupling_file);
  field("kappa_m", c.kappa_m);
  field("kappa_n", c.kappa_n);
  field("omega", c.omega);
  field("omega_min", c.omega_min);
  field("omega_max", c.omega_max);
  field("omega_count", c.omega_count);
  field("metric_file", c.metric_file);
  field("seed", c.seed);
  field("trials", c.trials);
  field("campaign_threshold", c.campaign_threshold);
  field("output", c.output);
  field("summary_output", c.summary_output);
  field("workers", c.workers);
  return c;
}

// ---------------------------------------------------------------------------
// Shared resolution helpers

inline Prototype parse_prototype(const std::string& name) {
  if (name == "hc1" || name == "Hc1") return Prototype::Hc1;
  if (name == "hc2" || name == "Hc2") return Prototype::Hc2;
  throw ConfigError("prototype: expected 'hc1' or 'hc2', got '" + name + "'");
}

inline ComplexMatrix resolve_center(const ScenarioConfig& c) {
  if (c.prototype.has_value() == c.matrix_file.has_value()) {
    throw ConfigError("center: give exactly one of a prototype or a matrix file");
  }
  ComplexMatrix h = c.prototype ? make_prototype(parse_prototype(*c.prototype), c.v, c.gamma)
                                : read_matrix_file(*c.matrix_file);
  if (!h.is_square()) throw ConfigError("center: matrix must be square");
  return c.dagger ? dagger(h) : h;
}

inline ScatteringSystem resolve_system(const ScenarioConfig& c) {
  try {
    return ScatteringSystem::with_sites(resolve_center(c), c.ports, c.j);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
}

inline std::vector<double> k_grid(const ScenarioConfig& c) {
  if (c.k) {
    require_open_band(*c.k);
    return {*c.k};
  }
  if (c.k_count == 0) throw ConfigError("k_count must be positive");
  require_open_band(c.k_min);
  require_open_band(c.k_max);
  if (c.k_count > 1 && !(c.k_min < c.k_max)) throw ConfigError("k_min must be below k_max");
  std::vector<double> ks;
  for (std::size_t i = 0; i < c.k_count; ++i) {
    ks.push_back(c.k_count == 1 ? c.k_min
                                : c.k_min + (c.k_max - c.k_min) * static_cast<double>(i) /
                                                static_cast<double>(c.k_count - 1));
  }
  return ks;
}

inline std::string entry_suffix(std::size_t p, std::size_t q) {
  return std::to_string(p) + std::to_string(q);
}

// ---------------------------------------------------------------------------
// sweep

/// One row per k with S(H), S(H^dagger), intensities and conservation residuals.
inline std::string run_sweep(const ScenarioConfig& c) {
  const ScatteringSystem sys = resolve_system(c);
  const ScatteringSystem sys_bar = sys.daggered();
  const auto ks = k_grid(c);
  const std::size_t p = sys.port_count();

  // Units and the phase convention ride in the column names: one header row only.
  const std::string conv = "[" + std::string(convention_key(c.convention)) + "]";
  std::string out;

  CsvRow header;
  header << std::string("k[rad/site]") << "E[J=" + format_double(c.j) + "]";
  for (const char* tag : {"s", "sbar"}) {
    for (const char* part : {"re_", "im_", "abs2_"})
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b)
          header << std::string(part) + tag + entry_suffix(a, b) + conv;
  }
  header << std::string("law_residual");
  for (std::size_t a = 0; a < p; ++a) header << "eq1_residual_" + std::to_string(a);
  header << std::string("eq2_residual_max");
  if (p == 2) {
    header << std::string("sum_L") << std::string("diff_L") << std::string("sum_R")
           << std::string("diff_R") << std::string("flux_sum_residual")
           << std::string("flux_diff_residual");
  }
  out += header.str();

  const auto rows = parallel_map(
      ks.size(),
      [&](std::size_t i) {
        const double k = ks[i];
        const ScatteringMatrix s = scattering_matrix(sys, k, c.convention);
        const ScatteringMatrix sb = scattering_matrix(sys_bar, k, c.convention);
        const ConservationReport rep = verify_conservation_law(s, sb, c.tol);

        CsvRow row;
        row << k << mode_params(k, c.j).energy;
        for (const ScatteringMatrix* m : {&s, &sb}) {
          for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) row << m->entries(a, b).real();
          for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) row << m->entries(a, b).imag();
          for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) row << std::norm(m->entries(a, b));
        }
        row << rep.law_residual;
        for (const auto& d : rep.diag_residuals) row << std::abs(d);
        double off = 0.0;
        for (const auto& o : rep.offdiag_residuals) off = std::max(off, std::abs(o.value));
        row << off;
        if (p == 2) {
          const double rl = std::norm(s.r_left()), tl = std::norm(s.t_left());
          const double rr = std::norm(s.r_right()), tr = std::norm(s.t_right());
          double sum_dev = std::max(std::abs(rl + tl - 1.0), std::abs(rr + tr - 1.0));
          double diff_dev = std::max(std::abs(rl - tl - 1.0), std::abs(rr - tr - 1.0));
          row << rl + tl << rl - tl << rr + tr << rr - tr << sum_dev << diff_dev;
        }
        return row.str();
      },
      c.workers);
  for (const auto& r : rows) out += r;
  return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyResult {
  nlohmann::json report;
  bool passed = false;
};

inline VerifyResult run_verify(const ScenarioConfig& c) {
  const ScatteringSystem sys = resolve_system(c);
  const double k = c.k.value_or(std::numbers::pi / 2);
  const ScatteringMatrix s = scattering_matrix(sys, k, c.convention);
  const ScatteringMatrix sb = scattering_matrix(sys.daggered(), k, c.convention);
  const ConservationReport rep = verify_conservation_law(s, sb, c.tol);

  nlohmann::json j;
  j["config"] = to_json(c);
  j["k"] = k;
  j["law_residual"] = rep.law_residual;
  j["flux_class"] = sys.port_count() == 2 ? to_string(rep.flux_class) : "not-applicable";
  if (sys.port_count() == 2) j["flux_residual"] = rep.flux_residual;
  j["diag"] = nlohmann::json::array();
  for (const auto& d : rep.diag_residuals) j["diag"].push_back(complex_to_json(d));
  j["offdiag"] = nlohmann::json::array();
  for (const auto& o : rep.offdiag_residuals) {
    auto e = complex_to_json(o.value);
    e["row"] = o.row;
    e["col"] = o.col;
    j["offdiag"].push_back(std::move(e));
  }
  j["s"] = matrix_to_json(s.entries);
  j["s_bar"] = matrix_to_json(sb.entries);
  const bool passed = rep.law_residual <= c.campaign_threshold;
  j["passed"] = passed;
  return {std::move(j), passed};
}

// ---------------------------------------------------------------------------
// classify

inline nlohmann::json run_classify(const ScenarioConfig& c) {
  const ComplexMatrix h = resolve_center(c);
  const std::size_t n = h.rows();
  if (c.ports.size() != 2) throw ConfigError("classify: exactly two port sites are required");
  const std::size_t m_site = c.ports[0];
  const std::size_t n_site = c.ports[1];
  if (m_site >= n || n_site >= n || m_site == n_site) {
    throw ConfigError("classify: port sites must be distinct and inside the center");
  }

  nlohmann::json j;
  j["config"] = to_json(c);
  j["dimension"] = n;
  j["ports"] = {m_site, n_site};
  j["hermitian"] = (h - h.adjoint()).frobenius_norm() < 1e-12 * std::max(1.0, h.max_abs());
  j["anti_hermitian"] = (h + h.adjoint()).frobenius_norm() < 1e-12 * std::max(1.0, h.max_abs());

  const auto basis = metric_space(h);
  j["metric_dimension"] = basis.size();
  j["metric_basis"] = nlohmann::json::array();
  for (const auto& q : basis) {
    nlohmann::json e;
    e["q"] = matrix_to_json(q.q);
    e["invertible"] = q.invertible;
    try {
      const auto sig = port_signature(q, m_site, n_site);
      e["port_signature"] = {sig.s_m, sig.s_n};
    } catch (const ConditionFailed& f) {
      e["port_signature"] = nullptr;
      e["port_condition_failure"] = {{"row", f.row()}, {"col", f.col()}};
    }
    j["metric_basis"].push_back(std::move(e));
  }
  j["has_invertible_metric"] =
      std::any_of(basis.begin(), basis.end(), [](const auto& q) { return q.invertible; });

  const auto port_metrics = find_port_metrics(basis, m_site, n_site);
  j["port_metrics"] = nlohmann::json::array();
  std::optional<PortSignature> protecting;
  for (const auto& pm : port_metrics) {
    j["port_metrics"].push_back(
        {{"q", matrix_to_json(pm.q)},
         {"signature", {pm.port_signature->s_m, pm.port_signature->s_n}}});
    if (!protecting) protecting = pm.port_signature;
  }
  j["predicted_flux_class"] = to_string(predicted_flux_class(protecting));

  // Anti-PT with P = sigma_x for dimers, the site-reversal permutation otherwise.
  ComplexMatrix perm(n, n);
  std::string perm_name;
  if (c.permutation_file) {
    perm = read_matrix_file(*c.permutation_file);
    perm_name = "user";
    if (perm.rows() != n || !perm.is_square()) {
      throw ConfigError("classify: permutation matrix must match the center dimension");
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) perm(i, n - 1 - i) = 1.0;
    perm_name = n == 2 ? "sigma_x" : "reversal";
  }
  j["anti_pt"] = {{"operator", perm_name}, {"holds", is_anti_pt(h, perm)}};

  if (n == 2) {
    const auto [l1, l2] = eig2(h);
    j["eigenvalues"] = {complex_to_json(l1), complex_to_json(l2)};
  }
  if (c.prototype) j["phase"] = to_string(phase_of(c.v, c.gamma));

  if (c.k) {
    const auto sys = ScatteringSystem::with_sites(h, c.ports, c.j);
    const auto verdict = classify_flux(scattering_matrix(sys, *c.k, c.convention), c.tol);
    j["observed_flux_class"] = to_string(verdict.flux_class);
    j["observed_flux_residual"] = verdict.residual;
  }
  return j;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveResult {
  std::string frames_csv;
  nlohmann::json summary;
  bool valid = false;
};

inline double default_t_final(long n0, double k, double j) {
  return (std::abs(static_cast<double>(n0)) + 60.0) / mode_params(k, j).group_velocity;
}

inline EvolveResult run_evolve(const ScenarioConfig& c, bool emit_frames = true) {
  const ScatteringSystem sys = resolve_system(c);
  if (sys.port_count() != 2) throw ConfigError("evolve: exactly two ports are required");
  if (c.left_len < 50 || c.right_len < 50) {
    throw GeometryTooSmall("evolve: leads need at least 50 sites each");
  }
  const double k = c.k.value_or(std::numbers::pi / 2);
  const Chain chain = build_chain(sys, c.left_len, c.right_len);
  const PacketSpec spec{c.n0, c.sigma, k};
  const Packet packet = gaussian_packet(chain.geometry, spec);

  Rk4Options opt;
  opt.dt = c.dt;
  opt.t_final = c.t_final.value_or(default_t_final(c.n0, k, c.j));
  opt.frames = c.frames;
  WaveTrajectory traj = propagate_rk4(chain.hamiltonian, packet.psi, opt);
  traj.geometry = chain.geometry;
  traj.packet = spec;

  EvolveResult res;
  nlohmann::json& s = res.summary;
  s["config"] = to_json(c);
  s["chain_length"] = chain.geometry.total();
  s["packet_norm2"] = packet.norm2;
  s["t_final"] = opt.t_final;
  s["diverged"] = traj.diverged;

  const auto series = rt_series(traj);
  const RtSample& last = series.back();
  s["R"] = last.reflection;
  s["T"] = last.transmission;
  s["leak"] = last.center;
  try {
    const RtMeasurement m = measure_rt(traj);
    s["boundary"] = m.boundary;
    res.valid = !traj.diverged;
  } catch (const BoundaryContamination& e) {
    s["boundary_error"] = e.what();
    res.valid = false;
  }
  s["valid"] = res.valid;

  try {
    const ScatteringMatrix sm = scattering_matrix(sys, k, c.convention);
    s["plane_wave"] = {{"r2", std::norm(sm.r_left())}, {"t2", std::norm(sm.t_left())}};
  } catch (const ScatteringSingularity&) {
    s["plane_wave"] = nullptr;
  }
  s["series"] = nlohmann::json::array();
  for (const auto& r : series) {
    s["series"].push_back({{"t", r.t}, {"R", r.reflection}, {"T", r.transmission},
                           {"center", r.center}});
  }

  if (emit_frames) {
    std::string& csv = res.frames_csv;
    // site is the global chain index: left lead, then center, then right lead.
    csv = "t[1/J],site[global],re_psi,im_psi,abs2\n";
    for (std::size_t f = 0; f < traj.states.size(); ++f) {
      for (std::size_t g = 0; g < traj.states[f].size(); ++g) {
        const cplx z = traj.states[f][g];
        CsvRow row;
        row << traj.times[f] << g << z.real() << z.imag() << std::norm(z);
        csv += row.str();
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// cmt

inline std::string run_cmt(const ScenarioConfig& c) {
  const ComplexMatrix h = resolve_center(c);
  const std::size_t n = h.rows();
  if (c.ports.size() != 2) throw ConfigError("cmt: exactly two port sites are required");
  const std::size_t m_site = c.ports[0];
  const std::size_t n_site = c.ports[1];
  const ComplexMatrix d = c.coupling_file
                              ? read_matrix_file(*c.coupling_file)
                              : aligned_coupling(n, m_site, n_site, c.kappa_m, c.kappa_n);
  if (d.rows() != n) throw ConfigError("cmt: coupling matrix needs one row per mode");
  const std::size_t p = d.cols();

  std::optional<ComplexMatrix> q;
  std::string metric_note = "none";
  if (c.metric_file) {
    q = read_matrix_file(*c.metric_file);
    metric_note = "file";
  } else if (p == 2 && n <= kMetricMaxDim) {
    const auto found = find_port_metrics(metric_space(h), m_site, n_site);
    if (!found.empty()) {
      q = found.front().q;
      metric_note = found.front().port_signature->product() > 0 ? "auto(+1)" : "auto(-1)";
    }
  }

  std::vector<double> omegas;
  if (c.omega) {
    omegas.push_back(*c.omega);
  } else {
    if (c.omega_count == 0) throw ConfigError("omega_count must be positive");
    const double scale = h.max_abs() > 0.0 ? h.max_abs() : 1.0;
    for (std::size_t i = 0; i < c.omega_count; ++i) {
      const double x = c.omega_count == 1
                           ? c.omega_min
                           : c.omega_min + (c.omega_max - c.omega_min) * static_cast<double>(i) /
                                               static_cast<double>(c.omega_count - 1);
      omegas.push_back(x * scale);
    }
  }

  std::string out;
  CsvRow header;
  header << std::string("omega[H_c units]");
  for (const char* part : {"re_", "im_", "abs2_"})
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) header << std::string(part) + "s" + entry_suffix(a, b);
  header << std::string("law_residual") << "relation_residual[metric=" + metric_note + "]";
  out += header.str();

  const auto rows = parallel_map(
      omegas.size(),
      [&](std::size_t i) {
        const CmtCoupling coupling{d, omegas[i]};
        const ComplexMatrix s = cmt_smatrix(h, coupling);
        CsvRow row;
        row << omegas[i];
        for (std::size_t a = 0; a < p; ++a)
          for (std::size_t b = 0; b < p; ++b) row << s(a, b).real();
        for (std::size_t a = 0; a < p; ++a)
          for (std::size_t b = 0; b < p; ++b) row << s(a, b).imag();
        for (std::size_t a = 0; a < p; ++a)
          for (std::size_t b = 0; b < p; ++b) row << std::norm(s(a, b));
        row << cmt_law_residual(h, coupling);
        double relation = std::numeric_limits<double>::quiet_NaN();
        if (q) relation = verify_cmt_relations(h, coupling, *q, m_site, n_site).relation;
        row << relation;
        return row.str();
      },
      c.workers);
  for (const auto& r : rows) out += r;
  return out;
}

// ---------------------------------------------------------------------------
// campaign

struct CampaignTrial {
  ComplexMatrix center;
  std::vector<std::size_t> ports;
  double k;
};

/// Random center with entries uniform in the unit disc, N in [2, 6],
/// P in {2, 3} (P <= N) on distinct random sites, k uniform in (0.05, pi - 0.05).
inline CampaignTrial draw_trial(Rng& rng) {
  const std::size_t n = rng.integer(2, 6);
  const std::size_t p = n == 2 ? 2 : rng.integer(2, 3);
  CampaignTrial t{rng.matrix(n, n), rng.distinct(n, p), 0.0};
  t.k = rng.uniform(0.05, std::numbers::pi - 0.05);
  return t;
}

struct IdentityResiduals {
  double law = 0.0;
  double transpose = 0.0;
  double conjugate = 0.0;
  double dagger = 0.0;
};

/// Residuals of S^dagger(H^dagger) S(H) = I, S(H^T) = S(H)^T,
/// S(H^*) = [S(H)^*]^{-1} and S(H^dagger) = [S(H)^dagger]^{-1}.
inline IdentityResiduals identity_residuals(const ScatteringSystem& sys, double k,
                                            Convention conv = Convention::PaperPlane) {
  const ComplexMatrix& h = sys.center();
  const ComplexMatrix s = scattering_matrix(sys, k, conv).entries;
  const ComplexMatrix s_t = scattering_matrix(sys.with_center(h.transpose()), k, conv).entries;
  const ComplexMatrix s_c = scattering_matrix(sys.with_center(h.conj()), k, conv).entries;
  const ComplexMatrix s_d = scattering_matrix(sys.with_center(h.adjoint()), k, conv).entries;
  IdentityResiduals r;
  r.law = (s_d.adjoint() * s - ComplexMatrix::identity(s.rows())).frobenius_norm();
  r.transpose = (s_t - s.transpose()).frobenius_norm();
  r.conjugate = (s_c - invert(s.conj())).frobenius_norm();
  r.dagger = (s_d - invert(s.adjoint())).frobenius_norm();
  return r;
}

struct CampaignResult {
  nlohmann::json summary;
  bool passed = true;
};

inline CampaignResult run_campaign(const ScenarioConfig& c) {
  Rng rng(c.seed);
  std::vector<CampaignTrial> trials;
  trials.reserve(c.trials);
  for (std::size_t i = 0; i < c.trials; ++i) trials.push_back(draw_trial(rng));

  struct Outcome {
    std::optional<IdentityResiduals> residuals;
  };
  const auto outcomes = parallel_map(
      trials.size(),
      [&](std::size_t i) {
        const auto& t = trials[i];
        try {
          const auto sys = ScatteringSystem::with_sites(t.center, t.ports, c.j);
          return Outcome{identity_residuals(sys, t.k, c.convention)};
        } catch (const NumericalError&) {
          return Outcome{std::nullopt};
        }
      },
      c.workers);

  IdentityResiduals worst;
  std::size_t singular = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].residuals) {
      ++singular;
      continue;
    }
    const auto& r = *outcomes[i].residuals;
    worst.law = std::max(worst.law, r.law);
    worst.transpose = std::max(worst.transpose, r.transpose);
    worst.conjugate = std::max(worst.conjugate, r.conjugate);
    worst.dagger = std::max(worst.dagger, r.dagger);
    if (std::max({r.law, r.transpose, r.conjugate, r.dagger}) > c.campaign_threshold) {
      failures.push_back(i);
    }
  }

  CampaignResult res;
  res.passed = failures.empty();
  auto& s = res.summary;
  s["config"] = to_json(c);
  s["trials"] = c.trials;
  s["evaluated"] = c.trials - singular;
  s["singular"] = singular;
  s["max_law_residual"] = worst.law;
  s["max_transpose_residual"] = worst.transpose;
  s["max_conjugate_residual"] = worst.conjugate;
  s["max_dagger_residual"] = worst.dagger;
  s["threshold"] = c.campaign_threshold;
  s["failures"] = std::move(failures);
  s["passed"] = res.passed;
  return res;
}

} // namespace nhscatter
