// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qite/ground_search.hpp"
#include "qite/ite.hpp"
#include "qite/pauli.hpp"

namespace qite::experiments {

inline constexpr std::size_t kDeskShots = 1'000'000;
inline constexpr std::size_t kPaperShots = 1'000'000'000;

enum class Kind { LambdaSweep, TauSweep, GroundSearch, TrotterDiag, ApproxDiag };

Kind kind_from_string(const std::string& s);
std::string to_string(Kind k);

/// Run configuration. Unset optionals take per-experiment defaults in
/// resolve_defaults(); the JSON keys are the member names.
struct ExperimentConfig {
  Kind experiment = Kind::LambdaSweep;
  std::optional<std::uint64_t> seed;
  std::string hamiltonian = "heisenberg4";
  std::optional<std::string> input_state;  // "zero" | "half_overlap"

  std::optional<double> tau;
  std::optional<double> tau0;
  std::optional<double> dt;
  std::optional<double> alpha;
  std::optional<double> eps_target;
  std::optional<int> degree;
  std::optional<std::size_t> shots;
  std::optional<double> B;
  std::optional<double> lambda;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<std::vector<double>> tau_grid;
  std::optional<std::vector<int>> steps_grid;
  std::optional<int> points;

  std::string mode = "block";
  bool exact_loss = false;
  std::string start_mode = "scan";
  std::string budget = "initial_tau";
  int max_iterations = 200;
  bool runtime_checks = false;
  std::string output;
};

/// Parses and validates a config object. Unknown keys, type mismatches and
/// constraint violations throw std::invalid_argument naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig validate_config(const std::filesystem::path& path);

/// Fills every unset field that has a context-free default. Fields whose
/// default depends on the Hamiltonian (B, lambda) stay unset until the run.
ExperimentConfig resolve_defaults(ExperimentConfig cfg);

/// Structural checks on a (possibly partial) config; throws on the first violation.
void validate(const ExperimentConfig& cfg);

/// Normalized Hamiltonian named by cfg.hamiltonian.
pauli::PauliSum load_model(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  Table table;
  nlohmann::json manifest;  // resolved config, hash and summary results
  std::vector<std::string> failed_checks;
  bool ok() const { return failed_checks.empty(); }
};

RunReport run_lambda_sweep(const ExperimentConfig& cfg);
RunReport run_tau_sweep(const ExperimentConfig& cfg);
RunReport run_ground_search(const ExperimentConfig& cfg);
RunReport run_trotter_diag(const ExperimentConfig& cfg);
RunReport run_approx_diag(const ExperimentConfig& cfg);
RunReport run(const ExperimentConfig& cfg);

/// Writes the CSV (first line "# manifest_hash=<hex>") and, next to it,
/// "<stem>.manifest.json".
void write_outputs(const RunReport& report, const std::filesystem::path& csv_path);

/// 64-bit FNV-1a hash of the canonical dump of the resolved config, as hex.
/// The "output" path is dropped first, so the hash names the run and not
/// where it was written.
std::string manifest_hash(const nlohmann::json& resolved_config);

/// 17 significant digits.
std::string format_double(double x);

/// Worker count from QITE_THREADS (default 1).
int worker_count();

/// Evaluates body(i) for i in [0, n) on the worker pool; results keep index order.
template <typename T, typename Body>
std::vector<T> parallel_map(std::size_t n, Body&& body);

}  // namespace qite::experiments

#include "qite/experiments_impl.hpp"
