// nhscatter: scenario runner for scattering through non-Hermitian centers.
//
//   nhscatter sweep    --prototype hc1 --gamma 0.3333 --out sweep.csv
//   nhscatter evolve   --prototype hc1 --dagger --out frames.csv --summary summary.json
//   nhscatter classify --prototype hc2
//   nhscatter verify   --matrix center.json --ports 0,2 --k 1.1
//   nhscatter cmt      --prototype hc2 --omega-count 61
//   nhscatter campaign --seed 1 --trials 100
//
// Exit codes: 0 success, 2 config error, 3 numerical error, 4 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nhscatter/error.hpp"
#include "nhscatter/scenario.hpp"

namespace {

using nhscatter::ConfigError;

enum class Kind { Str, Real, Int, Unsigned, Flag, SiteList };

struct OptionSpec {
  const char* flag;
  const char* key;
  Kind kind;
  const char* help;
};

const std::vector<OptionSpec> kOptions = {
    {"--prototype", "prototype", Kind::Str, "center prototype: hc1 | hc2"},
    {"--v", "v", Kind::Real, "prototype detuning V (units of J)"},
    {"--gamma", "gamma", Kind::Real, "prototype coupling gamma (units of J)"},
    {"--matrix", "matrix_file", Kind::Str, "center matrix JSON file"},
    {"--dagger", "dagger", Kind::Flag, "use the Hermitian conjugate of the center"},
    {"--ports", "ports", Kind::SiteList, "comma-separated port sites (0-based)"},
    {"--J", "j", Kind::Real, "lead hopping J"},
    {"--k", "k", Kind::Real, "single wave vector in (0, pi)"},
    {"--k-min", "k_min", Kind::Real, "sweep start"},
    {"--k-max", "k_max", Kind::Real, "sweep end"},
    {"--k-count", "k_count", Kind::Unsigned, "sweep points"},
    {"--convention", "convention", Kind::Str, "phase convention: paper | raw"},
    {"--tol", "tol", Kind::Real, "flux classification tolerance"},
    {"--left-len", "left_len", Kind::Unsigned, "left lead sites (evolve)"},
    {"--right-len", "right_len", Kind::Unsigned, "right lead sites (evolve)"},
    {"--n0", "n0", Kind::Int, "packet center site (evolve)"},
    {"--sigma", "sigma", Kind::Real, "packet width (evolve)"},
    {"--dt", "dt", Kind::Real, "RK4 step (evolve)"},
    {"--t-final", "t_final", Kind::Real, "final time (evolve)"},
    {"--frames", "frames", Kind::Unsigned, "frame count (evolve)"},
    {"--permutation", "permutation_file", Kind::Str, "anti-PT operator P as matrix JSON"},
    {"--coupling", "coupling_file", Kind::Str, "CMT coupling D as matrix JSON"},
    {"--kappa-m", "kappa_m", Kind::Real, "decay rate into channel 0 (aligned D)"},
    {"--kappa-n", "kappa_n", Kind::Real, "decay rate into channel 1 (aligned D)"},
    {"--omega", "omega", Kind::Real, "single CMT frequency"},
    {"--omega-min", "omega_min", Kind::Real, "CMT sweep start (units of max|H_c|)"},
    {"--omega-max", "omega_max", Kind::Real, "CMT sweep end (units of max|H_c|)"},
    {"--omega-count", "omega_count", Kind::Unsigned, "CMT sweep points"},
    {"--metric", "metric_file", Kind::Str, "CMT metric q as matrix JSON"},
    {"--seed", "seed", Kind::Unsigned, "campaign seed"},
    {"--trials", "trials", Kind::Unsigned, "campaign trials"},
    {"--threshold", "campaign_threshold", Kind::Real, "verification failure threshold"},
    {"--out", "output", Kind::Str, "output path (default stdout)"},
    {"--summary", "summary_output", Kind::Str, "evolve summary JSON path (default stdout)"},
    {"--workers", "workers", Kind::Unsigned, "worker threads (0 = all cores)"},
};

nlohmann::json convert(const OptionSpec& spec, const std::string& raw) {
  try {
    switch (spec.kind) {
    case Kind::Str: return raw;
    case Kind::Real: return std::stod(raw);
    case Kind::Int: return std::stol(raw);
    case Kind::Unsigned:
      if (!raw.empty() && raw[0] == '-') throw std::invalid_argument(raw);
      return std::stoull(raw);
    case Kind::Flag: return true;
    case Kind::SiteList: {
      nlohmann::json sites = nlohmann::json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty() || item[0] == '-') throw std::invalid_argument(item);
        sites.push_back(std::stoull(item));
      }
      return sites;
    }
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("option ") + spec.flag + ": cannot parse '" + raw + "'");
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  bool dagger = false;
};

void register_options(Subcommand& sub) {
  sub.app->add_option("--config", sub.config_path, "JSON config file (flags override it)");
  for (const auto& spec : kOptions) {
    if (spec.kind == Kind::Flag) {
      sub.app->add_flag(spec.flag, sub.dagger, spec.help);
    } else {
      sub.app->add_option(spec.flag, sub.values[spec.key], spec.help);
    }
  }
}

nhscatter::ScenarioConfig resolve_config(const Subcommand& sub, const std::string& name) {
  nlohmann::json base = nlohmann::json::object();
  if (!sub.config_path.empty()) base = nhscatter::read_json_file(sub.config_path);
  if (!base.is_object()) throw ConfigError("config file must hold a JSON object");

  nlohmann::json patch = nlohmann::json::object();
  for (const auto& spec : kOptions) {
    if (sub.app->count(spec.flag) == 0) continue;
    patch[spec.key] = spec.kind == Kind::Flag ? nlohmann::json(true)
                                              : convert(spec, sub.values.at(spec.key));
  }
  // A center given on the command line replaces the file's center source.
  if (patch.contains("prototype")) base.erase("matrix_file");
  if (patch.contains("matrix_file")) base.erase("prototype");
  base.merge_patch(patch);
  base["subcommand"] = name;
  return nhscatter::config_from_json(base);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

int exit_code(nhscatter::ErrorCategory c) {
  switch (c) {
  case nhscatter::ErrorCategory::Config: return 2;
  case nhscatter::ErrorCategory::Numerical: return 3;
  case nhscatter::ErrorCategory::Verification: return 4;
  }
  return 1;
}

int run(const std::string& name, const nhscatter::ScenarioConfig& cfg) {
  using namespace nhscatter;
  if (name == "sweep") {
    write_text(cfg.output, run_sweep(cfg));
    return 0;
  }
  if (name == "verify") {
    const auto res = run_verify(cfg);
    write_text(cfg.output, res.report.dump(2) + "\n");
    return res.passed ? 0 : 4;
  }
  if (name == "classify") {
    write_text(cfg.output, run_classify(cfg).dump(2) + "\n");
    return 0;
  }
  if (name == "evolve") {
    const bool frames = !cfg.output.empty();
    const auto res = run_evolve(cfg, frames);
    if (frames) write_text(cfg.output, res.frames_csv);
    write_text(cfg.summary_output, res.summary.dump(2) + "\n");
    return res.valid ? 0 : 4;
  }
  if (name == "cmt") {
    write_text(cfg.output, run_cmt(cfg));
    return 0;
  }
  if (name == "campaign") {
    const auto res = run_campaign(cfg);
    write_text(cfg.output, res.summary.dump(2) + "\n");
    return res.passed ? 0 : 4;
  }
  throw ConfigError("unknown subcommand " + name);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering through non-Hermitian tight-binding centers"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> names = {
      {"sweep", "S(H) and S(H^dagger) over a k-grid as CSV"},
      {"evolve", "Gaussian wave-packet simulation; frames CSV and summary JSON"},
      {"classify", "metric space, port conditions, anti-PT and flux-class prediction"},
      {"verify", "conservation-law report at one k"},
      {"cmt", "coupled-mode-theory S(omega) and relation residuals as CSV"},
      {"campaign", "seeded random check of the conservation law and S-matrix identities"},
  };
  std::vector<Subcommand> subs(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    subs[i].app = app.add_subcommand(names[i].first, names[i].second);
    register_options(subs[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!subs[i].app->parsed()) continue;
    try {
      const auto cfg = resolve_config(subs[i], names[i].first);
      return run(names[i].first, cfg);
    } catch (const nhscatter::Error& e) {
      std::cerr << "nhscatter " << names[i].first << ": " << e.what() << "\n";
      return exit_code(e.category());
    } catch (const std::exception& e) {
      std::cerr << "nhscatter " << names[i].first << ": " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
