// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/trotter.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace qite::trotter {

TrotterPlan build_trotter(const pauli::PauliSum& h, double t, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("Trotter step count must be at least 1");
  TrotterPlan plan;
  plan.steps = n_steps;
  plan.time = t;
  plan.qubits = h.qubit_count();
  for (const auto& term : h.terms()) {
    plan.per_step_sequence.push_back({term.string, 2.0 * term.coeff * t / n_steps});
  }
  return plan;
}

double trotter_error_bound(int L, double Lam, double t, int n_steps) {
  if (L <= 0 || !(Lam > 0.0) || !(t > 0.0) || n_steps <= 0) {
    throw std::invalid_argument("Trotter bound inputs must be positive");
  }
  const double x = L * Lam * t;
  return x * x / n_steps * std::exp(x / n_steps);
}

int default_steps(const pauli::PauliSum& h, double t, double gap, double eps) {
  const double target = std::min(gap / 4.0, eps);
  if (!(target > 0.0)) throw std::invalid_argument("Trotter target accuracy must be positive");
  for (int n = 1; n > 0 && n <= (1 << 30); n *= 2) {
    if (trotter_error_bound(h.term_count(), h.max_abs_coeff(), t, n) <= target) return n;
  }
  throw std::runtime_error("no feasible Trotter step count below 2^30");
}

sv::StateVector apply_plan(const TrotterPlan& plan, const sv::StateVector& s) {
  sv::StateVector out = s;
  for (int n = 0; n < plan.steps; ++n) {
    for (const auto& r : plan.per_step_sequence) out = sv::apply_pauli_rotation(out, r.string, r.angle);
  }
  return out;
}

Mat dense(const TrotterPlan& plan) {
  const Eigen::Index dim = Eigen::Index{1} << plan.qubits;
  Mat step(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    sv::StateVector col = sv::StateVector::basis(plan.qubits, static_cast<std::uint64_t>(b));
    for (const auto& r : plan.per_step_sequence) col = sv::apply_pauli_rotation(col, r.string, r.angle);
    step.col(b) = col.amplitudes();
  }
  // step^N by binary powering.
  Mat result = Mat::Identity(dim, dim);
  Mat base = step;
  for (int n = plan.steps; n > 0; n >>= 1) {
    if (n & 1) result = base * result;
    if (n > 1) base = base * base;
  }
  return result;
}

double operator_distance(const Mat& a, const Mat& b) {
  Eigen::JacobiSVD<Mat> svd(a - b);
  return svd.singularValues()(0);
}

TrotterITEResult prepare_ite_trotter(const pauli::PauliSum& h, const sv::StateVector& phi, double tau, double lam,
                                     double eps, int n_steps, const ite::PrepareOptions& options) {
  const pauli::SpectrumInfo truth = pauli::diagonalize(h);
  if (truth.degenerate) throw std::invalid_argument("Trotterized pipeline needs a nondegenerate ground state");
  const int steps = n_steps > 0 ? n_steps : default_steps(h, 1.0, truth.gap, eps);
  const TrotterPlan plan = build_trotter(h, 1.0, steps);
  const TrotterUnitary u(plan);

  TrotterITEResult out;
  out.steps = steps;
  out.trotter_error = operator_distance(u.matrix(), truth.evolution(1.0));
  out.trotter_bound = trotter_error_bound(h.term_count(), h.max_abs_coeff(), 1.0, steps);
  if (out.trotter_error >= truth.gap / 2.0) {
    throw std::domain_error("Trotter error " + std::to_string(out.trotter_error) + " is not below gap/2 = " +
                            std::to_string(truth.gap / 2.0));
  }

  const approx::ApproxSpec spec = approx::make_spec(tau, lam, options.alpha);
  const approx::Fit fit = approx::fit_with_hint(spec, eps, options.degree_hint);
  if (options.require_eps && !fit.reached) {
    throw std::runtime_error("approximation failure: best eps " + std::to_string(fit.spec.eps));
  }
  out.ite = ite::run_pipeline(fit, u, phi, truth, h, options.mode, options.max_comb_degree);
  return out;
}

}  // namespace qite::trotter
