// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qite/experiments.hpp"
#include "qite/pauli.hpp"

using namespace qite;
namespace ex = qite::experiments;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ex::ExperimentConfig parse(const json& j) { return ex::resolve_defaults(ex::config_from_json(j)); }

std::size_t column(const ex::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  throw std::out_of_range(name);
}

double cell(const ex::Table& t, std::size_t row, const std::string& name) {
  return std::stod(t.rows[row][column(t, name)]);
}

const std::filesystem::path kTmp = std::filesystem::temp_directory_path() / "qite_experiments_test";

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  const json j = {{"experiment", "lambda_sweep"},
                  {"seed", 5},
                  {"tau", 12.0},
                  {"lambda_grid", {{"min", 0.5}, {"max", 0.9}, {"count", 5}}},
                  {"mode", "block"}};
  const ex::ExperimentConfig cfg = parse(j);
  ASSERT_TRUE(cfg.lambda_grid);
  EXPECT_EQ(cfg.lambda_grid->size(), 5u);
  EXPECT_DOUBLE_EQ(cfg.lambda_grid->at(2), 0.7);
  EXPECT_EQ(*cfg.seed, 5u);
  EXPECT_NO_THROW(ex::validate(cfg));
  const ex::ExperimentConfig back = ex::config_from_json(ex::to_json(cfg));
  EXPECT_EQ(ex::to_json(back), ex::to_json(cfg));
}

TEST(Config, Defaults) {
  const ex::ExperimentConfig lam = parse({{"experiment", "lambda_sweep"}, {"seed", 1}});
  EXPECT_EQ(*lam.tau, 20.0);
  EXPECT_EQ(*lam.alpha, 0.85);
  EXPECT_EQ(*lam.input_state, "half_overlap");
  EXPECT_EQ(lam.lambda_grid->size(), 81u);
  const ex::ExperimentConfig gs = parse({{"experiment", "ground_search"}, {"seed", 1}});
  EXPECT_EQ(*gs.tau0, 20.0);
  EXPECT_EQ(*gs.dt, 2.5);
  EXPECT_EQ(*gs.shots, ex::kDeskShots);
  EXPECT_EQ(gs.output, "ground_search.csv");
}

TEST(Config, Rejections) {
  EXPECT_THROW(ex::config_from_json({{"experiment", "lambda_sweep"}, {"colour", 1}}), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json({{"seed", 1}}), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json({{"experiment", "warp"}}), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json({{"experiment", "tau_sweep"}, {"seed", -3}}), std::invalid_argument);
  EXPECT_THROW(ex::config_from_json({{"experiment", "tau_sweep"}, {"tau", "ten"}}), std::invalid_argument);

  try {
    ex::validate(parse({{"experiment", "lambda_sweep"}}));
    FAIL() << "missing seed accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
  try {
    ex::validate(parse({{"experiment", "lambda_sweep"}, {"seed", 1}, {"alpha", 0.3}}));
    FAIL() << "alpha 0.3 accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  EXPECT_THROW(ex::validate(parse({{"experiment", "ground_search"}, {"seed", 1}, {"mode", "comb"}})),
               std::invalid_argument);
  EXPECT_THROW(ex::validate(parse({{"experiment", "lambda_sweep"}, {"seed", 1}, {"lambda_grid", {0.5, 1.5}}})),
               std::invalid_argument);
  EXPECT_THROW(ex::validate(parse({{"experiment", "trotter_diag"}, {"seed", 1}, {"steps_grid", {0}}})),
               std::invalid_argument);
}

TEST(Config, FileValidation) {
  std::filesystem::create_directories(kTmp);
  const auto path = kTmp / "cfg.json";
  {
    std::ofstream out(path);
    out << R"({"experiment": "approx_diag", "seed": 3, "points": 11})";
  }
  EXPECT_EQ(*ex::validate_config(path).points, 11);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(ex::validate_config(path), std::invalid_argument);
  EXPECT_THROW(ex::validate_config(kTmp / "absent.json"), std::invalid_argument);
}

TEST(Manifest, HashIsFnv1aOfCanonicalDump) {
  const json cfg = ex::to_json(parse({{"experiment", "trotter_diag"}, {"seed", 9}}));
  char want[17];
  json keyed = cfg;
  keyed.erase("output");
  std::snprintf(want, sizeof(want), "%016llx", static_cast<unsigned long long>(fnv1a(keyed.dump())));
  EXPECT_EQ(ex::manifest_hash(cfg), want);
  json moved = cfg;
  moved["output"] = "elsewhere/run.csv";
  EXPECT_EQ(ex::manifest_hash(moved), ex::manifest_hash(cfg));
  json other = cfg;
  other["seed"] = 10;
  EXPECT_NE(ex::manifest_hash(other), ex::manifest_hash(cfg));
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, -0.7735026918962576, 1e-300, 12345.678901234567}) {
    EXPECT_EQ(std::stod(ex::format_double(x)), x);
  }
}

TEST(Workers, EnvironmentAndParallelMap) {
  ::setenv("QITE_THREADS", "3", 1);
  EXPECT_EQ(ex::worker_count(), 3);
  const auto squares = ex::parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(squares[i], static_cast<int>(i * i));
  EXPECT_THROW(ex::parallel_map<int>(10,
                                     [](std::size_t i) -> int {
                                       if (i == 7) throw std::runtime_error("boom");
                                       return 0;
                                     }),
               std::runtime_error);
  ::setenv("QITE_THREADS", "zero", 1);
  EXPECT_THROW(ex::worker_count(), std::invalid_argument);
  ::unsetenv("QITE_THREADS");
  EXPECT_EQ(ex::worker_count(), 1);
}

TEST(Outputs, HeaderManifestAndByteIdentity) {
  std::filesystem::create_directories(kTmp);
  const ex::ExperimentConfig cfg = parse({{"experiment", "trotter_diag"}, {"seed", 2}});
  ex::validate(cfg);
  const ex::RunReport a = ex::run(cfg);
  const ex::RunReport b = ex::run(cfg);
  ex::write_outputs(a, kTmp / "a.csv");
  ex::write_outputs(b, kTmp / "b.csv");
  const std::string text = slurp(kTmp / "a.csv");
  EXPECT_EQ(text, slurp(kTmp / "b.csv"));
  EXPECT_EQ(text.rfind("# manifest_hash=" + a.manifest.at("manifest_hash").get<std::string>(), 0), 0u);
  ASSERT_TRUE(std::filesystem::exists(kTmp / "a.manifest.json"));
  const json m = json::parse(slurp(kTmp / "a.manifest.json"));
  EXPECT_EQ(m.at("manifest_hash"), a.manifest.at("manifest_hash"));
}

TEST(Outputs, ThreadCountDoesNotChangeResults) {
  const ex::ExperimentConfig cfg =
      parse({{"experiment", "lambda_sweep"}, {"seed", 4}, {"tau", 8.0}, {"eps_target", 1e-3},
             {"lambda_grid", {{"min", 0.6}, {"max", 1.0}, {"count", 5}}}});
  const ex::RunReport serial = ex::run(cfg);
  ::setenv("QITE_THREADS", "3", 1);
  const ex::RunReport threaded = ex::run(cfg);
  ::unsetenv("QITE_THREADS");
  EXPECT_EQ(serial.table.rows, threaded.table.rows);
}

TEST(TrotterDiag, ErrorsBelowBoundAndQuarterRatios) {
  const ex::RunReport r = ex::run(parse({{"experiment", "trotter_diag"}, {"seed", 2}}));
  ASSERT_EQ(r.table.rows.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE(cell(r.table, i, "measured_error"), cell(r.table, i, "bound"));
    if (i >= 2) EXPECT_NEAR(cell(r.table, i, "ratio_to_previous"), 4.0, 0.5);
  }
}

TEST(ApproxDiag, ColumnsAndWindowError) {
  const ex::RunReport r = ex::run(parse({{"experiment", "approx_diag"}, {"seed", 2}, {"tau", 6.0},
                                         {"eps_target", 1e-3}, {"points", 101}}));
  ASSERT_EQ(r.table.rows.size(), 101u);
  EXPECT_EQ(r.table.columns, (std::vector<std::string>{"x", "f_exact", "F_re", "F_im", "abs_diff"}));
  const double lam = r.manifest.at("config").at("lambda").get<double>();
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    const double x = cell(r.table, i, "x");
    const double d = cell(r.table, i, "abs_diff");
    const double re = cell(r.table, i, "F_re"), im = cell(r.table, i, "F_im");
    EXPECT_NEAR(d, std::hypot(re - cell(r.table, i, "f_exact"), im), 1e-12);
    if (x >= -1.0 && x <= lam) EXPECT_LE(d, 1e-3);
  }
}

TEST(LambdaSweep, SinglePointMeetsSuccessFloor) {
  const double l0 = 5.0 / (3.0 + 2.0 * std::sqrt(3.0));
  const ex::RunReport r =
      ex::run(parse({{"experiment", "lambda_sweep"}, {"seed", 1}, {"lambda_grid", {l0 + 1.0 / 40.0}}}));
  ASSERT_EQ(r.table.rows.size(), 1u);
  const double eps = cell(r.table, 0, "eps");
  EXPECT_LE(eps, 1e-4);
  EXPECT_GE(cell(r.table, 0, "success_prob"), 0.0489 - eps);
  EXPECT_GE(cell(r.table, 0, "success_prob"), cell(r.table, 0, "lower_bound"));
  EXPECT_LE(cell(r.table, 0, "success_prob"), cell(r.table, 0, "upper_bound"));
}

TEST(TauSweep, EnergiesConvergeAndBoundsHold) {
  const ex::RunReport r = ex::run(parse({{"experiment", "tau_sweep"}, {"seed", 1}, {"runtime_checks", true}}));
  EXPECT_TRUE(r.ok());
  const auto spec = pauli::diagonalize(pauli::normalize(pauli::build_heisenberg(4)));
  const double gamma2 = 1.0 / 16.0;
  const std::size_t last = r.table.rows.size() - 1;
  ASSERT_EQ(cell(r.table, last, "tau"), 50.0);
  double prev = 1e300;
  for (std::size_t i = 0; i <= last; ++i) {
    EXPECT_GE(cell(r.table, i, "success_prob"), cell(r.table, i, "success_lower_bound"));
    const double err = std::abs(cell(r.table, i, "energy_expectation") - spec.ground_energy);
    EXPECT_LT(err, prev);
    prev = err;
  }
  const double tau = 50.0;
  const double bound = (spec.eigenvalues(1) - spec.ground_energy) * std::exp(-2 * tau * spec.gap) / gamma2 + 1e-6;
  EXPECT_LE(prev, bound);
}

TEST(GroundSearch, ExactLossWindowAndRerunIdentity) {
  const ex::ExperimentConfig cfg = parse({{"experiment", "ground_search"}, {"seed", 1}, {"exact_loss", true}});
  const ex::RunReport a = ex::run(cfg);
  const ex::RunReport b = ex::run(cfg);
  EXPECT_EQ(a.table.rows, b.table.rows);
  EXPECT_EQ(a.manifest.dump(), b.manifest.dump());
  const auto spec = pauli::diagonalize(pauli::normalize(pauli::build_heisenberg(4)));
  const std::size_t last = a.table.rows.size() - 1;
  const double lam = cell(a.table, last, "lambda_r");
  const double tau_final = cell(a.table, last, "tau") + 2.5;
  EXPECT_GE(lam, -spec.ground_energy);
  EXPECT_LE(lam, -spec.ground_energy + 1.0 / tau_final);
}
