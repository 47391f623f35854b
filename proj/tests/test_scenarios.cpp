// Scenario runners and file emission, exercised on deliberately small working
// points so the suite stays fast. Oracle for the short generation spans: the
// resonant parametric drive gives r = eps*eta*t/4, so 0.2 mcs at the default
// drive yields r = 0.1 with <n> = sinh^2(0.1) and squeezed-axis dispersion
// e^{-0.2}/2.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dce/scenarios.hpp"

using namespace dce;

namespace {

constexpr double kSinh2Tenth = 0.010033377809537924;  // sinh^2(0.1)
constexpr double kExpM02Half = 0.4093653765389909;    // e^{-0.2}/2

std::string scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "dce_scenarios_test";
  std::filesystem::remove_all(dir);
  return dir.string();
}

ExperimentConfig cheap_config() {
  ExperimentConfig cfg;
  cfg.generation_duration_mcs = 0.2;
  cfg.fock_dim = 24;
  cfg.tau_points = 5;
  cfg.fig2_tau_points = 9;
  cfg.atoms_per_point = 200;
  cfg.fig1_samples_per_interval = 4;
  cfg.fig1_fock_dim = 24;  // short intervals stay narrow; skip the automatic sizing
  cfg.out_dir = scratch_dir();
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_csv_provenance(const std::string& text) {
  CHECK(text.find("# dceprobe") != std::string::npos);
  CHECK(text.find("# config_begin") != std::string::npos);
  CHECK(text.find("# config_end") != std::string::npos);
  CHECK(text.find("seed = ") != std::string::npos);
  CHECK(text.back() == '\n');
}

void check_json_provenance(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.contains("artifact_version"));
  REQUIRE(j.contains("config"));
  CHECK(j["config"].contains("seed"));
}

}  // namespace

TEST_CASE("prepared field matches the short-span squeezing oracle") {
  const ExperimentConfig cfg = cheap_config();
  const PreparedField prep = prepare_field(cfg);
  CHECK(prep.field.rotating.mean_n() == doctest::Approx(kSinh2Tenth).epsilon(0.02));
  CHECK(prep.covariance.var_min == doctest::Approx(kExpM02Half).epsilon(0.005));
  // the squeezed axis sits at theta ~ 0 modulo the [0, pi) wrap
  const double axis = std::min(prep.theta_X, kPi - prep.theta_X);
  CHECK(axis < 0.02);
  // pinning theta manually is honoured
  ExperimentConfig manual = cfg;
  manual.theta_from_covariance = false;
  manual.theta = 0.4;
  CHECK(prepare_field(manual).theta_X == 0.4);
}

TEST_CASE("fig2 curves start at their tau = 0 anchors and converge by order") {
  const ExperimentConfig cfg = cheap_config();
  const Fig2Result fig2 = run_fig2(cfg);
  CHECK(fig2.mean_n == doctest::Approx(kSinh2Tenth).epsilon(0.02));

  const double anchors[3] = {1.0, 0.5, 0.25};
  for (int c = 0; c < 3; ++c) {
    const ProbabilityCurve& curve = fig2.curves[c];
    REQUIRE(curve.tau.size() == 9);
    REQUIRE(curve.exact.size() == curve.tau.size());
    REQUIRE(curve.series.size() == curve.tau.size());
    CHECK(curve.exact.front() == doctest::Approx(anchors[c]).epsilon(1e-12));
    CHECK(curve.series.front() == doctest::Approx(anchors[c]).epsilon(1e-12));
    for (double p : curve.exact) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    // Taylor remainder: the exact-vs-series gap grows with tau ...
    const auto gap = [&](std::size_t i) { return std::abs(curve.exact[i] - curve.series[i]); };
    CHECK(gap(8) > gap(2));
  }
  // ... and the two-atom remainder drops by at least 4x when tau halves
  const ProbabilityCurve& two = fig2.curves[2];
  const double g_full = std::abs(two.exact[8] - two.series[8]);   // tau = 0.08
  const double g_half = std::abs(two.exact[4] - two.series[4]);   // tau = 0.04
  CAPTURE(g_full);
  CAPTURE(g_half);
  CHECK(g_full / g_half >= 4.0);
}

TEST_CASE("headline estimates agree with direct operator averages") {
  const ExperimentConfig cfg = cheap_config();
  const Eq27Result res = run_eq27(cfg);
  CHECK(res.exact_mean_n == doctest::Approx(kSinh2Tenth).epsilon(0.02));
  CHECK(res.exact_mean_Q2 == doctest::Approx(kExpM02Half).epsilon(0.01));
  CHECK(std::abs(res.exact_mean_Q) < 1e-6);
  // estimator pipeline reproduces the operator moments on exact probabilities
  CHECK(res.mean_n.value == doctest::Approx(res.exact_mean_n).epsilon(0.01));
  CHECK(std::abs(res.mean_Q.value - res.exact_mean_Q) < 1e-4);
  CHECK(res.mean_Q2.value == doctest::Approx(res.exact_mean_Q2).epsilon(0.01));
  // a 0.2 mcs span cannot reach the 1 mcs reference bands
  CHECK_FALSE(res.within_bands);
}

TEST_CASE("scan bundles probabilities with a consistent witness verdict") {
  const ExperimentConfig cfg = cheap_config();
  const ScanResult scan = run_scan(cfg);
  REQUIRE(scan.plain.tau.size() == 5);
  CHECK(scan.plain.variant == ScanVariant::Plain1Atom);
  CHECK(scan.rotated1.theta == scan.theta_X);
  CHECK(scan.witness_direct.squeezed);     // e^{-0.2}/2 = 0.409 < 0.48
  CHECK(scan.witness_estimated.squeezed);
  CHECK(scan.witness_direct.min_variance ==
        doctest::Approx(kExpM02Half).epsilon(0.01));
  CHECK(std::abs(scan.witness_estimated.min_variance - scan.witness_direct.min_variance) < 2e-3);
  CHECK(scan.mean_n.value == doctest::Approx(kSinh2Tenth).epsilon(0.05));
}

TEST_CASE("monte carlo scenario reproduces its exact pipeline within noise") {
  ExperimentConfig cfg = cheap_config();
  cfg.atoms_per_point = 500;
  const McResult mc = run_mc(cfg);
  REQUIRE(mc.plain.summary.size() == 5);
  CHECK(mc.plain.entries.size() == 5u * 500u);
  CHECK(mc.rotated2.entries.size() == 2u * 5u * 500u);
  CHECK(mc.exact_mean_n.value == doctest::Approx(kSinh2Tenth).epsilon(0.02));
  // sampled estimates carry uncertainties and sit within a loose 5 sigma band
  CHECK(mc.mean_n.std_err > 0.0);
  CHECK(std::abs(mc.mean_n.value - mc.exact_mean_n.value) < 5.0 * mc.mean_n.std_err + 1e-9);
  CHECK(std::abs(mc.mean_Q2.value - mc.exact_mean_Q2.value) < 5.0 * mc.mean_Q2.std_err + 1e-9);
}

TEST_CASE("fig1 time series is structurally sound on a short working point") {
  ExperimentConfig cfg = cheap_config();
  cfg.generation_duration_mcs = 0.05;
  const Fig1Result fig1 = run_fig1(cfg);
  CHECK(fig1.interval_mcs == 0.05);
  CHECK(fig1.theta_squeezed >= 0.0);
  CHECK(fig1.theta_squeezed < kPi);
  CHECK(fig1.var_q_min_generated <= 0.5 + 1e-9);

  for (const TimeSeriesBranch* branch : {&fig1.solid, &fig1.dashed}) {
    REQUIRE(branch->rows.size() == 1u + 3u * 4u);
    CHECK(branch->rows.front().t_mcs == 0.0);
    for (std::size_t i = 1; i < branch->rows.size(); ++i)
      CHECK(branch->rows[i].t_mcs > branch->rows[i - 1].t_mcs);
    CHECK(branch->rows.back().t_mcs == doctest::Approx(0.15).epsilon(1e-9));
    for (const TimeSeriesRow& row : branch->rows) {
      CHECK(row.p_ground >= 0.0);
      CHECK(row.p_ground <= 1.0);
      CHECK(row.var_x > 0.0);
      CHECK(row.var_p > 0.0);
      CHECK(row.mean_n >= -1e-12);
    }
    CHECK(branch->max_norm_error < 1e-8);
  }
  CHECK(fig1.solid.dce_on_during_transits);
  CHECK_FALSE(fig1.dashed.dce_on_during_transits);
  // the generation interval is branch independent
  for (std::size_t i = 0; i <= 4; ++i) {
    CHECK(fig1.solid.rows[i].mean_n == doctest::Approx(fig1.dashed.rows[i].mean_n).epsilon(1e-12));
    CHECK(fig1.solid.rows[i].p_ground == 1.0);
  }
}

TEST_CASE("writers emit provenance-stamped files in both formats") {
  ExperimentConfig cfg = cheap_config();
  cfg.generation_duration_mcs = 0.05;
  cfg.atoms_per_point = 50;

  const Fig1Result fig1 = run_fig1(cfg);
  const Fig2Result fig2 = run_fig2(cfg);
  const Eq27Result eq = run_eq27(cfg);
  const ScanResult scan = run_scan(cfg);
  const McResult mc = run_mc(cfg);

  cfg.format = OutputFormat::Csv;
  for (const std::string& path : write_fig1(fig1, cfg)) check_csv_provenance(slurp(path));
  for (const std::string& path : write_fig2(fig2, cfg)) check_csv_provenance(slurp(path));
  for (const std::string& path : write_eq27(eq, cfg)) check_csv_provenance(slurp(path));
  for (const std::string& path : write_scan(scan, cfg)) check_csv_provenance(slurp(path));

  const std::vector<std::string> mc_paths = write_mc(mc, cfg);
  REQUIRE(mc_paths.size() == 4);  // three click records plus the estimate table
  CHECK(mc_paths[0].find("mc_plain.clicks") != std::string::npos);
  CHECK(slurp(mc_paths[0]).find("# variant = plain-1atom") != std::string::npos);
  check_csv_provenance(slurp(mc_paths[3]));

  cfg.format = OutputFormat::Json;
  check_json_provenance(slurp(write_fig1(fig1, cfg).front()));
  check_json_provenance(slurp(write_fig2(fig2, cfg).front()));
  check_json_provenance(slurp(write_eq27(eq, cfg).front()));
  check_json_provenance(slurp(write_scan(scan, cfg).front()));
  check_json_provenance(slurp(write_mc(mc, cfg).back()));

  // fig1 csv columns are documented in the header line
  const std::string solid = slurp(cfg.out_dir + "/fig1_solid.csv");
  CHECK(solid.find("t_mcs,p_ground,mean_n,var_x,var_p") != std::string::npos);
  CHECK(solid.find("# max_norm_error = ") != std::string::npos);
}
