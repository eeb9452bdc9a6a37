// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qite/ite.hpp"
#include "qite/pauli.hpp"
#include "qite/statevector.hpp"

namespace qite::trotter {

struct TrotterRotation {
  pauli::PauliString string;
  double angle = 0.0;  // e^{-i angle P / 2}
};

/// First-order product formula [prod_j e^{-i (t/N) h_j sigma_j}]^N with the
/// terms in input order.
struct TrotterPlan {
  int steps = 1;
  int order = 1;
  double time = 1.0;
  int qubits = 0;
  std::vector<TrotterRotation> per_step_sequence;
};

TrotterPlan build_trotter(const pauli::PauliSum& h, double t, int n_steps);

/// (L Lam t)^2 / N * exp(L Lam t / N)
double trotter_error_bound(int L, double Lam, double t, int n_steps);

/// Smallest power of two whose bound is at most min(gap / 4, eps).
int default_steps(const pauli::PauliSum& h, double t, double gap, double eps);

sv::StateVector apply_plan(const TrotterPlan& plan, const sv::StateVector& s);
Mat dense(const TrotterPlan& plan);

/// Spectral norm of the difference between two operators.
double operator_distance(const Mat& a, const Mat& b);

class TrotterUnitary final : public sv::UnitaryOperator {
 public:
  explicit TrotterUnitary(const TrotterPlan& plan) : u_(dense(plan)) {}
  int qubit_count() const override { return u_.qubit_count(); }
  Vec apply(const Vec& v) const override { return u_.apply(v); }
  Vec apply_adjoint(const Vec& v) const override { return u_.apply_adjoint(v); }
  const Mat& matrix() const { return u_.matrix(); }

 private:
  sv::DenseUnitary u_;
};

struct TrotterITEResult {
  ite::ITEResult ite;
  int steps = 0;
  double trotter_error = 0.0;  // measured ||U_plan - e^{-iH}||
  double trotter_bound = 0.0;
};

/// The ITE pipeline with e^{-iH} replaced by the Trotter unitary. Fidelity is
/// reported against the exact ITE state of the true Hamiltonian. Refuses when
/// the measured Trotter error is not below gap / 2. n_steps <= 0 selects
/// default_steps().
TrotterITEResult prepare_ite_trotter(const pauli::PauliSum& h, const sv::StateVector& phi, double tau, double lam,
                                     double eps, int n_steps, const ite::PrepareOptions& options = {});

}  // namespace qite::trotter
