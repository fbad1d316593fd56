#include <gtest/gtest.h>

#include <numbers>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nhscatter/scenario.hpp"
#include "test_util.hpp"

using namespace nhscatter;
using nlohmann::json;

namespace {

ScenarioConfig config(const json& j) { return config_from_json(j); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

} // namespace

TEST(Config, DefaultsAndRoundTrip) {
  const ScenarioConfig c = config({{"subcommand", "sweep"}, {"prototype", "hc1"}});
  EXPECT_DOUBLE_EQ(c.gamma, 1.0 / 3.0);
  EXPECT_EQ(c.ports, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c.convention, Convention::PaperPlane);
  const ScenarioConfig again = config_from_json(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, Rejections) {
  EXPECT_THROW(config({{"gama", 0.3}}), ConfigError);
  EXPECT_THROW(config({{"gamma", "big"}}), ConfigError);
  EXPECT_THROW(config({{"convention", "weird"}}), ConfigError);
  EXPECT_THROW(config(json::array()), ConfigError);
  EXPECT_THROW(resolve_center(config({{"subcommand", "sweep"}})), ConfigError);
  EXPECT_THROW(resolve_center(config({{"prototype", "hc1"}, {"matrix_file", "x.json"}})),
               ConfigError);
  EXPECT_THROW(resolve_center(config({{"prototype", "hc3"}})), ConfigError);
  EXPECT_THROW(resolve_system(config({{"prototype", "hc1"}, {"ports", {0, 2}}})), ConfigError);
  EXPECT_THROW(k_grid(config({{"k_min", 0.0}})), BandEdge);
  EXPECT_THROW(k_grid(config({{"k_count", 0}})), ConfigError);
}

TEST(Config, DaggerFlag) {
  const auto h = resolve_center(config({{"prototype", "hc1"}, {"dagger", true}}));
  EXPECT_EQ(h, make_prototype(Prototype::Hc1, 0.0, -1.0 / 3.0));
}

TEST(Sweep, ThreeRowsPlusHeader) {
  const auto rows = parse_csv(run_sweep(
      config({{"subcommand", "sweep"}, {"prototype", "hc1"}, {"k_count", 3}, {"workers", 1}})));
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_EQ(r.size(), rows[0].size());
  EXPECT_EQ(rows[0][0], "k[rad/site]");
}

TEST(Sweep, Hc1IntensitiesAtHalfPi) {
  // Odd grid over a range symmetric about pi/2 puts the middle row at pi/2.
  const auto rows = parse_csv(run_sweep(config(
      {{"prototype", "hc1"}, {"k_min", 0.5}, {"k_max", std::numbers::pi - 0.5}, {"k_count", 5}})));
  const auto& mid = rows[3];
  EXPECT_NEAR(std::stod(mid[column(rows[0], "abs2_s00[paper]")]), 0.36, 1e-12);
  EXPECT_NEAR(std::stod(mid[column(rows[0], "abs2_s10[paper]")]), 0.16, 1e-12);
  EXPECT_NEAR(std::stod(mid[column(rows[0], "abs2_sbar00[paper]")]), 9.0, 1e-11);
}

TEST(Sweep, Hc2DifferenceColumnIsUnity) {
  const auto rows = parse_csv(run_sweep(config({{"prototype", "hc2"}, {"k_count", 200}})));
  ASSERT_EQ(rows.size(), 201u);
  const std::size_t dl = column(rows[0], "diff_L"), dr = column(rows[0], "diff_R");
  const std::size_t law = column(rows[0], "law_residual");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_NEAR(std::stod(rows[i][dl]), 1.0, 1e-12);
    EXPECT_NEAR(std::stod(rows[i][dr]), 1.0, 1e-12);
    EXPECT_LT(std::stod(rows[i][law]), 1e-12);
  }
}

TEST(Sweep, OrderIndependentOfWorkerCount) {
  const json base = {{"prototype", "hc2"}, {"k_count", 37}};
  json a = base, b = base;
  a["workers"] = 1;
  b["workers"] = 4;
  EXPECT_EQ(run_sweep(config(a)), run_sweep(config(b)));
}

TEST(Sweep, RawConventionNamedInHeader) {
  const auto rows =
      parse_csv(run_sweep(config({{"prototype", "hc2"}, {"k_count", 2}, {"convention", "raw"}})));
  EXPECT_EQ(rows[0][2], "re_s00[raw]");
}

TEST(Verify, HermitianCenterIsEnergyConserving) {
  const auto path = std::filesystem::temp_directory_path() / "nhscatter_herm.json";
  Rng rng(91);
  {
    std::ofstream out(path);
    out << matrix_to_json(rng.hermitian(3)).dump();
  }
  const auto res = run_verify(
      config({{"matrix_file", path.string()}, {"ports", {0, 2}}, {"k", 1.1}}));
  std::filesystem::remove(path);
  EXPECT_TRUE(res.passed);
  EXPECT_EQ(res.report.at("flux_class"), "energy-conserving");
  EXPECT_LT(res.report.at("law_residual").get<double>(), 1e-12);
  EXPECT_EQ(res.report.at("config").at("ports"), json({0, 2}));
}

TEST(Verify, ThreePortsNotApplicable) {
  const auto path = std::filesystem::temp_directory_path() / "nhscatter_three.json";
  Rng rng(92);
  {
    std::ofstream out(path);
    out << matrix_to_json(rng.matrix(4, 4)).dump();
  }
  const auto res = run_verify(config({{"matrix_file", path.string()}, {"ports", {0, 1, 3}}}));
  std::filesystem::remove(path);
  EXPECT_EQ(res.report.at("flux_class"), "not-applicable");
  EXPECT_EQ(res.report.at("offdiag").size(), 6u);
}

TEST(Classify, Hc2) {
  const json j = run_classify(config({{"prototype", "hc2"}}));
  EXPECT_EQ(j.at("metric_dimension"), 2);
  EXPECT_EQ(j.at("predicted_flux_class"), "energy-difference");
  EXPECT_TRUE(j.at("anti_pt").at("holds").get<bool>());
  EXPECT_EQ(j.at("phase"), "exact");
  EXPECT_TRUE(j.at("anti_hermitian").get<bool>());
}

TEST(Classify, Hc1) {
  const json j = run_classify(config({{"prototype", "hc1"}, {"k", 1.2}}));
  EXPECT_FALSE(j.at("has_invertible_metric").get<bool>());
  EXPECT_EQ(j.at("predicted_flux_class"), "neither");
  EXPECT_EQ(j.at("observed_flux_class"), "neither");
  EXPECT_TRUE(j.at("anti_hermitian").get<bool>());
}

TEST(Evolve, Hc1Summary) {
  const auto res = run_evolve(config({{"prototype", "hc1"}}), false);
  EXPECT_TRUE(res.valid);
  EXPECT_TRUE(res.frames_csv.empty());
  EXPECT_NEAR(res.summary.at("R").get<double>(), 0.36, 0.02);
  EXPECT_NEAR(res.summary.at("T").get<double>(), 0.16, 0.02);
  EXPECT_EQ(res.summary.at("series").size(), 51u);
  EXPECT_DOUBLE_EQ(res.summary.at("t_final").get<double>(), 55.0);
}

TEST(Evolve, FramesCsvShape) {
  const auto res = run_evolve(config({{"prototype", "hc2"},
                                      {"left_len", 60},
                                      {"right_len", 60},
                                      {"n0", -30},
                                      {"sigma", 5.0},
                                      {"frames", 3}}),
                              true);
  const auto rows = parse_csv(res.frames_csv);
  ASSERT_EQ(rows.size(), 1u + 4u * 122u);
  EXPECT_EQ(rows[0][0], "t[1/J]");
}

TEST(Evolve, ShortLeadsRejected) {
  EXPECT_THROW(run_evolve(config({{"prototype", "hc1"}, {"left_len", 40}})), GeometryTooSmall);
}

TEST(Cmt, Hc2AutoMetric) {
  const auto rows = parse_csv(run_cmt(config({{"prototype", "hc2"}, {"omega_count", 11}})));
  ASSERT_EQ(rows.size(), 12u);
  const std::size_t rel = rows[0].size() - 1;
  EXPECT_EQ(rows[0][rel], "relation_residual[metric=auto(-1)]");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][rel]), 1e-12);
    EXPECT_LT(std::stod(rows[i][rel - 1]), 1e-12);
  }
}

TEST(Cmt, Hc1HasNoMetric) {
  const auto rows = parse_csv(run_cmt(config({{"prototype", "hc1"}, {"omega", 0.2}})));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].back(), "nan");
}

TEST(Campaign, SeedOneHundredTrials) {
  const auto res = run_campaign(config({{"seed", 1}, {"trials", 100}}));
  EXPECT_TRUE(res.passed);
  EXPECT_LT(res.summary.at("max_law_residual").get<double>(), 1e-10);
  EXPECT_LT(res.summary.at("max_transpose_residual").get<double>(), 1e-10);
  EXPECT_LT(res.summary.at("max_conjugate_residual").get<double>(), 1e-10);
  EXPECT_LT(res.summary.at("max_dagger_residual").get<double>(), 1e-10);
}

TEST(Campaign, Deterministic) {
  json a = {{"seed", 7}, {"trials", 40}, {"workers", 1}};
  json b = a;
  b["workers"] = 3;
  EXPECT_EQ(run_campaign(config(a)).summary.dump(), run_campaign(config(b)).summary.dump());
}

TEST(Campaign, ZeroTrials) {
  const auto res = run_campaign(config({{"trials", 0}}));
  EXPECT_TRUE(res.passed);
  EXPECT_EQ(res.summary.at("evaluated"), 0);
  EXPECT_TRUE(res.summary.at("failures").empty());
}

TEST(Campaign, DrawTrialRanges) {
  Rng rng(93);
  for (int i = 0; i < 500; ++i) {
    const auto t = draw_trial(rng);
    EXPECT_GE(t.center.rows(), 2u);
    EXPECT_LE(t.center.rows(), 6u);
    EXPECT_GE(t.ports.size(), 2u);
    EXPECT_LE(t.ports.size(), 3u);
    EXPECT_GT(t.k, 0.05);
    EXPECT_LT(t.k, std::numbers::pi - 0.05);
    for (const auto& z : t.center.data()) EXPECT_LE(std::abs(z), 1.0);
  }
}
