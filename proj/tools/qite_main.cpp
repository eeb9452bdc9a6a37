// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "qite/experiments.hpp"

namespace ex = qite::experiments;

namespace {

struct Flags {
  std::string config;
  std::string experiment;
  std::optional<double> tau;
  std::optional<std::size_t> shots;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool exact_loss = false;
  std::string mode;
  bool paper_shots = false;
  bool checks = false;
};

ex::ExperimentConfig assemble(const std::string& subcommand, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::invalid_argument("cannot open config " + f.config);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("config parse error in " + f.config + ": " + e.what());
    }
  }
  if (!subcommand.empty()) {
    if (!f.experiment.empty() && f.experiment != subcommand) {
      throw std::invalid_argument("--experiment " + f.experiment + " contradicts subcommand " + subcommand);
    }
    j["experiment"] = subcommand;
  } else if (!f.experiment.empty()) {
    j["experiment"] = f.experiment;
  }
  ex::ExperimentConfig cfg = ex::config_from_json(j);
  if (f.tau) {
    if (cfg.experiment == ex::Kind::GroundSearch) {
      cfg.tau0 = *f.tau;
    } else {
      cfg.tau = *f.tau;
    }
  }
  if (f.paper_shots) cfg.shots = ex::kPaperShots;
  if (f.shots) cfg.shots = *f.shots;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output = f.out;
  if (f.exact_loss) cfg.exact_loss = true;
  if (!f.mode.empty()) cfg.mode = f.mode;
  if (f.checks) cfg.runtime_checks = true;
  cfg = ex::resolve_defaults(cfg);
  ex::validate(cfg);
  return cfg;
}

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--experiment", f.experiment, "experiment kind (must match the subcommand when both are given)");
  app->add_option("--tau", f.tau, "imaginary time (tau0 for ground_search)");
  app->add_option("--shots", f.shots, "shots per loss estimate (0 = formula budget)");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "output CSV path");
  app->add_flag("--exact-loss", f.exact_loss, "noiseless losses in ground_search");
  app->add_option("--mode", f.mode, "block or comb")->check(CLI::IsMember({"block", "comb"}));
  app->add_flag("--paper-shots", f.paper_shots, "use 1e9 shots per loss estimate");
  app->add_flag("--check", f.checks, "run the experiment's runtime checks and set the exit code");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-time evolution simulator and experiment driver"};
  app.require_subcommand(0, 1);
  Flags flags;
  add_flags(&app, flags);
  for (const char* name : {"lambda_sweep", "tau_sweep", "ground_search", "trotter_diag", "approx_diag"}) {
    add_flags(app.add_subcommand(name, std::string("run the ") + name + " experiment"), flags);
  }
  CLI11_PARSE(app, argc, argv);

  std::string subcommand;
  if (!app.get_subcommands().empty()) subcommand = app.get_subcommands().front()->get_name();
  if (subcommand.empty() && flags.experiment.empty() && flags.config.empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    const ex::ExperimentConfig cfg = assemble(subcommand, flags);
    const ex::RunReport report = ex::run(cfg);
    ex::write_outputs(report, cfg.output);
    std::cout << "wrote " << cfg.output << " (" << report.table.rows.size() << " rows, manifest "
              << report.manifest.at("manifest_hash").get<std::string>() << ")\n";
    if (report.manifest.contains("results")) std::cout << report.manifest.at("results").dump(2) << '\n';
    for (const auto& failure : report.failed_checks) std::cerr << "check failed: " << failure << '\n';
    return report.ok() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
