// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qite/approx.hpp"
#include "qite/trotter.hpp"

namespace qite::experiments {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config field '" + field + "': " + what);
}

template <typename T>
void read(const json& j, const std::string& key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    field_error(key, std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
void read(const json& j, const std::string& key, T& dst) {
  std::optional<T> tmp;
  read(j, key, tmp);
  if (tmp) dst = *tmp;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = count == 1 ? a : a + (b - a) * k / (count - 1);
  return v;
}

// A grid is either an explicit array or {"min": a, "max": b, "count": n}.
void read_grid(const json& j, const std::string& key, std::optional<std::vector<double>>& dst) {
  if (!j.contains(key)) return;
  const json& g = j.at(key);
  if (g.is_object()) {
    for (const auto& [k, v] : g.items()) {
      if (k != "min" && k != "max" && k != "count") field_error(key, "unknown grid key '" + k + "'");
      if (!v.is_number()) field_error(key, "grid '" + k + "' must be a number");
    }
    if (!g.contains("min") || !g.contains("max") || !g.contains("count")) {
      field_error(key, "grid object needs min, max and count");
    }
    const int count = g.at("count").get<int>();
    if (count < 1) field_error(key, "count must be positive");
    dst = linspace(g.at("min").get<double>(), g.at("max").get<double>(), count);
    return;
  }
  read(j, key, dst);
}

double min_tau(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Kind::TauSweep:
      return cfg.tau_grid && !cfg.tau_grid->empty() ? *std::min_element(cfg.tau_grid->begin(), cfg.tau_grid->end())
                                                    : 0.0;
    case Kind::GroundSearch:
      return cfg.tau0.value_or(0.0);
    default:
      return cfg.tau.value_or(0.0);
  }
}

void require_positive(const std::optional<double>& v, const std::string& name) {
  if (v && !(*v > 0.0 && std::isfinite(*v))) field_error(name, "must be a positive finite number");
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

struct Model {
  pauli::PauliSum h;
  pauli::SpectrumInfo truth;
  sv::StateVector phi;
  double gamma = 0.0;
};

Model build_model(const ExperimentConfig& cfg) {
  Model m;
  m.h = load_model(cfg);
  m.truth = pauli::diagonalize(m.h);
  const std::string state = cfg.input_state.value_or("zero");
  m.phi = state == "zero" ? sv::StateVector::basis(m.h.qubit_count(), 0) : ite::half_overlap_state(m.truth);
  m.gamma = pauli::overlap_gamma(m.truth, m.phi);
  return m;
}

json make_manifest(const ExperimentConfig& resolved) {
  const json cfg = to_json(resolved);
  return {{"tool", "qite"},
          {"format_version", kFormatVersion},
          {"config", cfg},
          {"manifest_hash", manifest_hash(cfg)}};
}

json spectrum_summary(const Model& m) {
  return {{"lambda0", m.truth.ground_energy},
          {"lambda1", m.truth.eigenvalues(1)},
          {"gap", m.truth.gap},
          {"gamma", m.gamma},
          {"terms", m.h.term_count()},
          {"Lambda", m.h.max_abs_coeff()},
          {"S", m.h.coeff_l1()}};
}

ite::PrepareOptions prepare_options(const ExperimentConfig& cfg) {
  ite::PrepareOptions o;
  o.alpha = *cfg.alpha;
  o.mode = ite::mode_from_string(cfg.mode);
  return o;
}

// Degree that meets cfg.eps_target for the spec (tau, lambda), or the fixed
// cfg.degree. Resolved once so that every grid point sees the same hint.
int reference_degree(const ExperimentConfig& cfg, double tau, double lambda) {
  if (cfg.degree) return *cfg.degree;
  const approx::Fit f = approx::fit_to_target(approx::make_spec(tau, lambda, *cfg.alpha), *cfg.eps_target);
  if (!f.reached) throw std::runtime_error("approximation failure: best eps " + std::to_string(f.spec.eps));
  return f.spec.degree;
}

// The minimal degree drifts by a fraction of a percent across a sweep, so
// the shared hint carries a small surplus to make most points a single fit.
int with_margin(int degree, const ExperimentConfig& cfg) {
  return cfg.degree ? degree : static_cast<int>(std::ceil(degree * 1.01));
}

ite::ITEResult run_point(const Model& m, const ExperimentConfig& cfg, double tau, double lambda, int hint) {
  ite::PrepareOptions o = prepare_options(cfg);
  o.degree_hint = hint;
  const double eps = cfg.degree ? std::numeric_limits<double>::infinity() : *cfg.eps_target;
  o.require_eps = !cfg.degree.has_value();
  return ite::prepare_ite(m.h, m.phi, tau, lambda, eps, o);
}

}  // namespace

Kind kind_from_string(const std::string& s) {
  if (s == "lambda_sweep") return Kind::LambdaSweep;
  if (s == "tau_sweep") return Kind::TauSweep;
  if (s == "ground_search") return Kind::GroundSearch;
  if (s == "trotter_diag") return Kind::TrotterDiag;
  if (s == "approx_diag") return Kind::ApproxDiag;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::LambdaSweep:
      return "lambda_sweep";
    case Kind::TauSweep:
      return "tau_sweep";
    case Kind::GroundSearch:
      return "ground_search";
    case Kind::TrotterDiag:
      return "trotter_diag";
    case Kind::ApproxDiag:
      return "approx_diag";
  }
  return "unknown";
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "seed",        "hamiltonian", "input_state", "tau",        "tau0",         "dt",
      "alpha",      "eps_target",  "degree",      "shots",       "B",          "lambda",       "lambda_grid",
      "tau_grid",   "steps_grid",  "points",      "mode",        "exact_loss", "start_mode",   "budget",
      "max_iterations", "runtime_checks", "output"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) field_error(k, "unknown key");
  }
  ExperimentConfig cfg;
  if (!j.contains("experiment")) field_error("experiment", "required");
  std::string kind;
  read(j, "experiment", kind);
  try {
    cfg.experiment = kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    field_error("experiment", e.what());
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      field_error("seed", "must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  read(j, "hamiltonian", cfg.hamiltonian);
  read(j, "input_state", cfg.input_state);
  read(j, "tau", cfg.tau);
  read(j, "tau0", cfg.tau0);
  read(j, "dt", cfg.dt);
  read(j, "alpha", cfg.alpha);
  read(j, "eps_target", cfg.eps_target);
  read(j, "degree", cfg.degree);
  if (j.contains("shots") && !j.at("shots").is_number_unsigned()) field_error("shots", "must be a non-negative integer");
  read(j, "shots", cfg.shots);
  read(j, "B", cfg.B);
  read(j, "lambda", cfg.lambda);
  read_grid(j, "lambda_grid", cfg.lambda_grid);
  read_grid(j, "tau_grid", cfg.tau_grid);
  read(j, "steps_grid", cfg.steps_grid);
  read(j, "points", cfg.points);
  read(j, "mode", cfg.mode);
  read(j, "exact_loss", cfg.exact_loss);
  read(j, "start_mode", cfg.start_mode);
  read(j, "budget", cfg.budget);
  read(j, "max_iterations", cfg.max_iterations);
  read(j, "runtime_checks", cfg.runtime_checks);
  read(j, "output", cfg.output);
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["hamiltonian"] = cfg.hamiltonian;
  if (cfg.input_state) j["input_state"] = *cfg.input_state;
  if (cfg.tau) j["tau"] = *cfg.tau;
  if (cfg.tau0) j["tau0"] = *cfg.tau0;
  if (cfg.dt) j["dt"] = *cfg.dt;
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  if (cfg.eps_target) j["eps_target"] = *cfg.eps_target;
  if (cfg.degree) j["degree"] = *cfg.degree;
  if (cfg.shots) j["shots"] = *cfg.shots;
  if (cfg.B) j["B"] = *cfg.B;
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  if (cfg.lambda_grid) j["lambda_grid"] = *cfg.lambda_grid;
  if (cfg.tau_grid) j["tau_grid"] = *cfg.tau_grid;
  if (cfg.steps_grid) j["steps_grid"] = *cfg.steps_grid;
  if (cfg.points) j["points"] = *cfg.points;
  j["mode"] = cfg.mode;
  j["exact_loss"] = cfg.exact_loss;
  j["start_mode"] = cfg.start_mode;
  j["budget"] = cfg.budget;
  j["max_iterations"] = cfg.max_iterations;
  j["runtime_checks"] = cfg.runtime_checks;
  j["output"] = cfg.output;
  return j;
}

ExperimentConfig resolve_defaults(ExperimentConfig cfg) {
  if (!cfg.alpha) cfg.alpha = 0.85;
  switch (cfg.experiment) {
    case Kind::LambdaSweep:
      if (!cfg.tau) cfg.tau = 20.0;
      if (!cfg.eps_target) cfg.eps_target = 1e-4;
      if (!cfg.input_state) cfg.input_state = "half_overlap";
      if (!cfg.lambda_grid) cfg.lambda_grid = linspace(0.2, 1.0, 81);
      break;
    case Kind::TauSweep:
      if (!cfg.eps_target) cfg.eps_target = 1e-5;
      if (!cfg.input_state) cfg.input_state = "zero";
      if (!cfg.tau_grid) cfg.tau_grid = linspace(10.0, 50.0, 9);
      break;
    case Kind::GroundSearch:
      if (!cfg.tau0) cfg.tau0 = 20.0;
      if (!cfg.dt) cfg.dt = 2.5;
      if (!cfg.shots) cfg.shots = kDeskShots;
      if (!cfg.input_state) cfg.input_state = "zero";
      break;
    case Kind::TrotterDiag:
      if (!cfg.steps_grid) cfg.steps_grid = std::vector<int>{1, 4, 16, 64, 256};
      break;
    case Kind::ApproxDiag:
      if (!cfg.tau) cfg.tau = 20.0;
      if (!cfg.eps_target) cfg.eps_target = 1e-4;
      if (!cfg.points) cfg.points = 2001;
      break;
  }
  if (cfg.output.empty()) cfg.output = to_string(cfg.experiment) + ".csv";
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (!cfg.seed) field_error("seed", "required");
  if (cfg.hamiltonian.empty()) field_error("hamiltonian", "must be \"heisenberg4\" or a file path");
  if (cfg.input_state && *cfg.input_state != "zero" && *cfg.input_state != "half_overlap") {
    field_error("input_state", "must be \"zero\" or \"half_overlap\"");
  }
  require_positive(cfg.tau, "tau");
  require_positive(cfg.tau0, "tau0");
  require_positive(cfg.eps_target, "eps_target");
  require_positive(cfg.B, "B");
  require_positive(cfg.lambda, "lambda");
  if (cfg.dt && !(*cfg.dt >= 0.0 && std::isfinite(*cfg.dt))) field_error("dt", "must be a non-negative number");
  if (cfg.alpha && !(*cfg.alpha > 0.0 && *cfg.alpha <= 1.0)) field_error("alpha", "must lie in (0, 1]");
  if (cfg.degree && *cfg.degree < 1) field_error("degree", "must be at least 1");
  if (cfg.points && *cfg.points < 2) field_error("points", "must be at least 2");
  if (cfg.max_iterations < 1) field_error("max_iterations", "must be at least 1");
  if (cfg.mode != "block" && cfg.mode != "comb") field_error("mode", "must be \"block\" or \"comb\"");
  if (cfg.start_mode != "scan" && cfg.start_mode != "printed") field_error("start_mode", "must be \"scan\" or \"printed\"");
  if (cfg.budget != "initial_tau" && cfg.budget != "current_tau") {
    field_error("budget", "must be \"initial_tau\" or \"current_tau\"");
  }
  if (cfg.tau_grid) {
    if (cfg.tau_grid->empty()) field_error("tau_grid", "must not be empty");
    for (double t : *cfg.tau_grid) {
      if (!(t > 0.0 && std::isfinite(t))) field_error("tau_grid", "entries must be positive");
    }
  }
  if (cfg.steps_grid) {
    if (cfg.steps_grid->empty()) field_error("steps_grid", "must not be empty");
    for (int n : *cfg.steps_grid) {
      if (n < 1) field_error("steps_grid", "entries must be at least 1");
    }
  }
  const double tmin = min_tau(cfg);
  if (cfg.lambda_grid) {
    if (cfg.lambda_grid->empty()) field_error("lambda_grid", "must not be empty");
    for (double l : *cfg.lambda_grid) {
      if (!(l > 0.0) || (tmin > 0.0 && l > 1.0 + 1.0 / tmin)) field_error("lambda_grid", "entries must lie in (0, 1 + 1/tau]");
    }
  }
  if (cfg.lambda && tmin > 0.0 && *cfg.lambda > 1.0 + 1.0 / tmin) field_error("lambda", "must lie in (0, 1 + 1/tau]");
  if (cfg.alpha && tmin > 0.0) {
    const double bound = approx::alpha_lower_bound(tmin);
    if (!(*cfg.alpha > bound)) {
      field_error("alpha", "must exceed the lower bound " + format_double(bound) + " at tau = " + format_double(tmin));
    }
  }
  if (cfg.mode == "comb" && cfg.experiment == Kind::GroundSearch) {
    field_error("mode", "ground_search samples the block encoding; comb mode is not available there");
  }
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path.string() + ": " + e.what());
  }
  ExperimentConfig cfg = resolve_defaults(config_from_json(j));
  validate(cfg);
  return cfg;
}

pauli::PauliSum load_model(const ExperimentConfig& cfg) {
  if (cfg.hamiltonian == "heisenberg4") return pauli::normalize(pauli::build_heisenberg(4));
  const pauli::PauliSum h = pauli::load_hamiltonian(cfg.hamiltonian);
  return h.normalized() ? h : pauli::normalize(h);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string manifest_hash(const json& resolved_config) {
  json keyed = resolved_config;
  if (keyed.is_object()) keyed.erase("output");
  const std::string text = keyed.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int worker_count() {
  const char* env = std::getenv("QITE_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw std::invalid_argument("QITE_THREADS must be a positive integer");
  return static_cast<int>(std::min(n, 256L));
}

RunReport run_lambda_sweep(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = resolve_defaults(cfg_in);
  validate(cfg);
  const Model m = build_model(cfg);
  const double tau = *cfg.tau;
  const double lam0 = std::abs(m.truth.ground_energy);
  const int hint = with_margin(reference_degree(cfg, tau, lam0 + 1.0 / (2.0 * tau)), cfg);
  const std::vector<double>& grid = *cfg.lambda_grid;

  struct Row {
    ite::ITEResult r;
    ite::ProbBounds b;
  };
  const auto rows = parallel_map<Row>(grid.size(), [&](std::size_t i) {
    Row row{run_point(m, cfg, tau, grid[i], hint), {}};
    const approx::ApproxSpec spec = approx::make_spec(tau, grid[i], *cfg.alpha);
    row.b = ite::success_prob_bounds(spec, m.truth, m.phi, row.r.eps_used);
    return row;
  });

  RunReport rep;
  rep.table.columns = {"lambda", "infidelity", "success_prob", "lower_bound", "upper_bound", "degree", "eps"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = rows[i].r;
    const double infid = 1.0 - r.fidelity_to_exact * r.fidelity_to_exact;
    rep.table.rows.push_back({fmt(grid[i]), fmt(infid), fmt(r.success_prob), fmt(rows[i].b.lower),
                              fmt(rows[i].b.upper), fmt(r.degree), fmt(r.eps_used)});
    if (cfg.runtime_checks && grid[i] >= lam0) {
      if (r.success_prob < rows[i].b.lower) rep.failed_checks.push_back("success below lower bound at lambda " + fmt(grid[i]));
      if (grid[i] <= lam0 + 1.0 / tau && infid > 1e-3) {
        rep.failed_checks.push_back("in-window infidelity above 1e-3 at lambda " + fmt(grid[i]));
      }
    }
  }
  rep.manifest = make_manifest(cfg);
  rep.manifest["results"] = {{"spectrum", spectrum_summary(m)}, {"reference_degree", hint}};
  return rep;
}

RunReport run_tau_sweep(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = resolve_defaults(cfg_in);
  validate(cfg);
  const Model m = build_model(cfg);
  const double lam0 = std::abs(m.truth.ground_energy);
  const std::vector<double>& grid = *cfg.tau_grid;
  const double t_ref = grid.front();
  const double ratio = reference_degree(cfg, t_ref, lam0 + 1.0 / (2.0 * t_ref)) / t_ref;

  struct Row {
    double lambda = 0.0;
    ite::ITEResult r;
    double lower = 0.0;
  };
  const auto rows = parallel_map<Row>(grid.size(), [&](std::size_t i) {
    const double tau = grid[i];
    const double lambda = lam0 + 1.0 / (2.0 * tau);
    const int hint = cfg.degree ? *cfg.degree : with_margin(static_cast<int>(std::ceil(ratio * tau)), cfg);
    Row row{lambda, run_point(m, cfg, tau, lambda, hint), 0.0};
    row.lower = ite::success_prob_bounds(approx::make_spec(tau, lambda, *cfg.alpha), m.gamma, m.truth.ground_energy,
                                         row.r.eps_used)
                    .lower;
    return row;
  });

  RunReport rep;
  rep.table.columns = {"tau",          "lambda",  "energy_expectation", "exact_ground_energy", "success_prob",
                       "success_lower_bound", "infidelity", "degree", "eps"};
  double prev_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& row = rows[i];
    const double err = std::abs(row.r.energy - m.truth.ground_energy);
    rep.table.rows.push_back({fmt(grid[i]), fmt(row.lambda), fmt(row.r.energy), fmt(m.truth.ground_energy),
                              fmt(row.r.success_prob), fmt(row.lower),
                              fmt(1.0 - row.r.fidelity_to_exact * row.r.fidelity_to_exact), fmt(row.r.degree),
                              fmt(row.r.eps_used)});
    if (cfg.runtime_checks) {
      if (row.r.success_prob < row.lower) rep.failed_checks.push_back("success below its lower bound at tau " + fmt(grid[i]));
      if (i > 0 && grid[i] > grid[i - 1] && !(err < prev_err)) {
        rep.failed_checks.push_back("energy error did not decrease at tau " + fmt(grid[i]));
      }
    }
    prev_err = err;
  }
  rep.manifest = make_manifest(cfg);
  rep.manifest["results"] = {{"spectrum", spectrum_summary(m)}, {"degree_per_tau", ratio}};
  return rep;
}

RunReport run_ground_search(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = resolve_defaults(cfg_in);
  validate(cfg);
  const Model m = build_model(cfg);
  const double lam0 = m.truth.ground_energy;
  if (!cfg.B) cfg.B = m.gamma * m.gamma * std::abs(lam0) * std::exp(-2.0);

  ground::SearchOptions o;
  o.alpha = *cfg.alpha;
  if (cfg.eps_target) o.eps_target = *cfg.eps_target;
  o.exact_loss = cfg.exact_loss;
  o.budget = cfg.budget == "initial_tau" ? ground::BudgetPolicy::InitialTau : ground::BudgetPolicy::CurrentTau;
  o.start = ground::start_mode_from_string(cfg.start_mode);
  o.max_iterations = cfg.max_iterations;
  const ground::SearchResult res =
      ground::run_adaptive_search(m.h, m.phi, *cfg.tau0, *cfg.dt, *cfg.B, *cfg.shots, *cfg.seed, o);

  RunReport rep;
  rep.table.columns = {"i",    "tau",     "lambda_l", "lambda_r", "r",       "branch",
                       "E_i",  "ci_low",  "ci_high",  "shots",    "queries", "degree"};
  for (const auto& rec : res.records) {
    rep.table.rows.push_back({fmt(rec.i), fmt(rec.tau), fmt(rec.lambda_l), fmt(rec.lambda_r), fmt(rec.r),
                              ground::to_string(rec.branch), fmt(rec.energy.value), fmt(rec.energy.ci.low),
                              fmt(rec.energy.ci.high), fmt(rec.shots), fmt(rec.cumulative_queries), fmt(rec.degree)});
  }
  const bool ci_ok = res.energy.ci.contains(lam0);
  const bool lambda_ok = res.lambda >= std::abs(lam0) && res.lambda <= std::abs(lam0) + 1.0 / res.tau;
  if (cfg.runtime_checks) {
    if (!ci_ok) rep.failed_checks.push_back("final confidence interval misses the ground energy");
    if (!lambda_ok) rep.failed_checks.push_back("final lambda outside [|lambda0|, |lambda0| + 1/tau]");
  }
  rep.manifest = make_manifest(cfg);
  rep.manifest["results"] = {
      {"spectrum", spectrum_summary(m)},
      {"tau", res.tau},
      {"lambda", res.lambda},
      {"E", res.energy.value},
      {"ci_low", res.energy.ci.low},
      {"ci_high", res.energy.ci.high},
      {"ternary_iterations", res.ternary_iterations},
      {"iteration_bound", ground::ternary_iteration_bound(res.tau)},
      {"start_lambda", res.start.lambda},
      {"start_evaluations", res.start.evaluations},
      {"total_queries", res.total_queries},
      {"ci_contains_lambda0", ci_ok},
      {"lambda_in_window", lambda_ok}};
  return rep;
}

RunReport run_trotter_diag(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = resolve_defaults(cfg_in);
  validate(cfg);
  const pauli::PauliSum h = load_model(cfg);
  const pauli::SpectrumInfo truth = pauli::diagonalize(h);
  const Mat exact = truth.evolution(1.0);
  const std::vector<int>& grid = *cfg.steps_grid;
  const auto errors = parallel_map<double>(grid.size(), [&](std::size_t i) {
    return trotter::operator_distance(trotter::dense(trotter::build_trotter(h, 1.0, grid[i])), exact);
  });

  RunReport rep;
  rep.table.columns = {"steps", "measured_error", "bound", "ratio_to_previous"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double bound = trotter::trotter_error_bound(h.term_count(), h.max_abs_coeff(), 1.0, grid[i]);
    const double ratio = i > 0 ? errors[i - 1] / errors[i] : std::numeric_limits<double>::quiet_NaN();
    rep.table.rows.push_back({fmt(grid[i]), fmt(errors[i]), fmt(bound), fmt(ratio)});
    if (cfg.runtime_checks && errors[i] > bound) rep.failed_checks.push_back("measured error above bound at N " + fmt(grid[i]));
  }
  rep.manifest = make_manifest(cfg);
  rep.manifest["results"] = {{"gap", truth.gap}, {"terms", h.term_count()}, {"Lambda", h.max_abs_coeff()}};
  return rep;
}

RunReport run_approx_diag(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = resolve_defaults(cfg_in);
  if (!cfg.lambda) {
    const pauli::SpectrumInfo truth = pauli::diagonalize(load_model(cfg));
    cfg.lambda = std::abs(truth.ground_energy) + 1.0 / (2.0 * *cfg.tau);
  }
  validate(cfg);
  const approx::ApproxSpec spec = approx::make_spec(*cfg.tau, *cfg.lambda, *cfg.alpha);
  const approx::Fit fit = cfg.degree ? approx::fit_with_hint(spec, std::numeric_limits<double>::infinity(), *cfg.degree)
                                     : approx::fit_to_target(spec, *cfg.eps_target);

  RunReport rep;
  rep.table.columns = {"x", "f_exact", "F_re", "F_im", "abs_diff"};
  const int n = *cfg.points;
  for (int k = 0; k < n; ++k) {
    const double x = -std::numbers::pi + 2.0 * std::numbers::pi * k / (n - 1);
    const double f = approx::target_g(x, spec);
    const cplx F = fit.poly.evaluate(x);
    rep.table.rows.push_back({fmt(x), fmt(f), fmt(F.real()), fmt(F.imag()), fmt(std::abs(F - f))});
  }
  if (cfg.runtime_checks && !cfg.degree && !fit.reached) rep.failed_checks.push_back("fit did not reach eps_target");
  rep.manifest = make_manifest(cfg);
  rep.manifest["results"] = {{"degree", fit.spec.degree},
                             {"eps", fit.spec.eps},
                             {"mu", fit.spec.mu},
                             {"sup_norm_circle", fit.poly.sup_norm_circle()},
                             {"reached", fit.reached}};
  return rep;
}

RunReport run(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Kind::LambdaSweep:
      return run_lambda_sweep(cfg);
    case Kind::TauSweep:
      return run_tau_sweep(cfg);
    case Kind::GroundSearch:
      return run_ground_search(cfg);
    case Kind::TrotterDiag:
      return run_trotter_diag(cfg);
    case Kind::ApproxDiag:
      return run_approx_diag(cfg);
  }
  throw std::logic_error("unhandled experiment kind");
}

void write_outputs(const RunReport& report, const std::filesystem::path& csv_path) {
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  csv << "# manifest_hash=" << report.manifest.at("manifest_hash").get<std::string>() << '\n';
  for (std::size_t c = 0; c < report.table.columns.size(); ++c) csv << (c ? "," : "") << report.table.columns[c];
  csv << '\n';
  for (const auto& row : report.table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
    csv << '\n';
  }
  std::filesystem::path manifest_path = csv_path;
  manifest_path.replace_extension(".manifest.json");
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write " + manifest_path.string());
  mf << report.manifest.dump(2) << '\n';
}

}  // namespace qite::experiments
