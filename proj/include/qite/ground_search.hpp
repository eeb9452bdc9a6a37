// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qite/approx.hpp"
#include "qite/ite.hpp"
#include "qite/pauli.hpp"
#include "qite/statevector.hpp"

namespace qite::ground {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double x) const { return x >= low && x <= high; }
};

/// 95% Agresti-Coull interval for a binomial proportion. `successes` and
/// `trials` may be fractional (expected counts in exact mode).
Interval agresti_coull(double successes, double trials, double z = kZ95);

/// Result of one loss estimation. Every ancilla-zero sample equals +S or -S,
/// so those samples are kept as the two counts.
struct LossEstimate {
  double value = 0.0;
  std::size_t shots_used = 0;
  double zero_plus = 0.0;   // ancilla-zero samples equal to +S
  double zero_minus = 0.0;  // ancilla-zero samples equal to -S
  double S = 0.0;
  std::uint64_t seed = 0;
  bool exact = false;
  int degree = 0;

  double zero_count() const { return zero_plus + zero_minus; }
};

struct EnergyEstimate {
  double value = 0.0;
  Interval ci;
  double samples = 0.0;
};

/// E = S (2q - 1) with q the share of +S among the pooled ancilla-zero samples.
EnergyEstimate energy_from_samples(const std::vector<const LossEstimate*>& sources);

/// <phi| f(U)^dag H f(U) |phi> with f the ideal target g (F == nullptr) or a
/// fitted polynomial, evaluated in the eigenbasis.
double loss_exact(const pauli::SpectrumInfo& truth, const sv::StateVector& phi, const approx::ApproxSpec& spec,
                  const approx::TrigPolynomial* F);
/// Convenience form: diagonalizes h; with use_F the polynomial is fitted at spec.degree.
double loss_exact(const pauli::PauliSum& h, const sv::StateVector& phi, const approx::ApproxSpec& spec, bool use_F);

/// ceil(8 L Lam^2 tau^3 / B^2)
std::size_t shot_budget(int L, double Lam, double tau, double B);

/// Joint state after the basis change T that maps sigma to a Z/I string on the
/// system register (qubits 1..n of the joint register).
sv::StateVector rotate_to_z_basis(const sv::StateVector& joint, const pauli::PauliString& sigma);

/// X = (1 - b0) sign(h_l) S <b| T sigma_l T^dag |b>.
double sample_value(const pauli::PauliSum& h, int term, const sv::MeasurementRecord& record);

/// Sampling estimator of the loss with the block-encoded F(U).
LossEstimate estimate_loss(const pauli::PauliSum& h, const sv::StateVector& joint, int degree, std::size_t shots,
                           std::uint64_t seed);
/// Convenience form: fits F at spec.degree and uses U = e^{-iH}.
LossEstimate estimate_loss(const pauli::PauliSum& h, const sv::StateVector& phi, const approx::ApproxSpec& spec,
                           std::size_t shots, std::uint64_t seed);

/// Loss evaluation at (tau, lambda) with cached diagonalization, unitary and
/// fit degrees. In exact mode the value is the noiseless loss with the fitted
/// F and the ancilla-zero counts are their expectations at the nominal shots.
class LossOracle {
 public:
  LossOracle(pauli::PauliSum h, sv::StateVector phi, double alpha, double eps_target, bool exact);

  LossEstimate estimate(double tau, double lambda, std::size_t shots, std::uint64_t seed);
  approx::Fit fit(double tau, double lambda);

  const pauli::PauliSum& hamiltonian() const { return h_; }
  const pauli::SpectrumInfo& spectrum() const { return truth_; }
  const sv::StateVector& input() const { return phi_; }
  bool exact() const { return exact_; }
  double eps_target() const { return eps_target_; }

 private:
  pauli::PauliSum h_;
  sv::StateVector phi_;
  pauli::SpectrumInfo truth_;
  sv::DenseUnitary u_;
  double alpha_;
  double eps_target_;
  bool exact_;
  double degree_ratio_ = 0.0;  // last accepted degree / tau, used as a hint
};

enum class StartMode {
  Scan,     // descending scan in steps of 1/(2 tau); default
  Printed,  // interval halving assuming a monotone loss
};

StartMode start_mode_from_string(const std::string& s);
std::string to_string(StartMode m);

struct StartResult {
  double lambda = 0.0;
  int halvings = 0;
  int evaluations = 0;
  bool threshold_met = false;
  std::string diagnostic;
};

/// Finds lambda with loss(lambda) <= -B and loss(lambda + 1/(2 tau)) > -B
/// starting from [1/tau, 1 + 1/tau]. `loss` returns the estimate at the current tau.
StartResult binary_search_start(const std::function<double(double)>& loss, double tau, double B,
                                StartMode mode = StartMode::Scan);

enum class Branch { LeftShrink, RightShrink };
std::string to_string(Branch b);

struct Decision {
  Branch branch = Branch::RightShrink;
  double r = 0.0;
};

Decision ternary_decide(double loss_lt, double loss_r, double tau, double delta);
Decision ternary_decide(const LossEstimate& loss_lt, const LossEstimate& loss_r, double tau, double delta);

bool convergence_test_X(const std::vector<EnergyEstimate>& history);

struct SearchState {
  double lambda_l = 0.0;
  double lambda_r = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  double dt = 0.0;
  double B = 0.0;
  int iteration = 0;
  std::vector<EnergyEstimate> energy_history;
};

struct IterationRecord {
  int i = 0;
  double tau = 0.0;
  double lambda_l = 0.0;  // interval after the update
  double lambda_r = 0.0;
  double r = 0.0;
  Branch branch = Branch::RightShrink;
  EnergyEstimate energy;
  std::size_t shots = 0;  // per loss estimation
  int degree = 0;
  double cumulative_queries = 0.0;
};

enum class BudgetPolicy { InitialTau, CurrentTau };

struct SearchOptions {
  double alpha = 0.85;
  double eps_target = 0.0;  // 0 selects min(1e-4, B / (16 tau0))
  bool exact_loss = false;
  BudgetPolicy budget = BudgetPolicy::InitialTau;
  StartMode start = StartMode::Scan;
  int max_iterations = 200;
};

struct SearchResult {
  double tau = 0.0;
  double lambda = 0.0;
  EnergyEstimate energy;
  int ternary_iterations = 0;
  StartResult start;
  std::vector<IterationRecord> records;
  SearchState final_state;
  double total_queries = 0.0;
};

/// Adaptive ternary search for |lambda_0| with energy harvesting.
/// shots_override == 0 selects shot_budget() under options.budget.
SearchResult run_adaptive_search(const pauli::PauliSum& h, const sv::StateVector& phi, double tau0, double dt,
                                 double B, std::size_t shots_override, std::uint64_t seed,
                                 SearchOptions options = {});

/// ceil(log_{3/2}(4 tau / 3))
int ternary_iteration_bound(double tau);

}  // namespace qite::ground
