// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qite/approx.hpp"
#include "qite/statevector.hpp"

namespace qite::qpp {

/// Single-ancilla comb
///   V = A_0 prod_{l=1..L} [ diag(U^dag, I) A_{2l-1} diag(I, U) A_{2l} ],
///   A_j = R_y(theta_y[j]) R_z(theta_z[j]),
/// where diag(P, Q) acts as P on the ancilla-0 branch and Q on the ancilla-1 branch.
struct QPPComb {
  std::vector<double> theta_y;
  std::vector<double> theta_z;
  int slots = 0;  // 2L queries to U or U^dag

  int layers() const { return slots / 2; }
  void validate() const;
};

struct PostSelectResult {
  sv::StateVector state;
  double success_prob = 0.0;
};

/// sum_k c_k U^k |phi> through 2 * degree applications of U and U^dag.
sv::StateVector apply_block(const approx::TrigPolynomial& F, const sv::UnitaryOperator& u, const sv::StateVector& phi);

/// Full ancilla+system output of an ideal block encoding of F(U):
///   |0>|F(U) phi> + sqrt(1 - ||F(U) phi||^2) |1>|phi>.
/// The ancilla-1 branch only has the correct weight; its system register is
/// not modelled and carries the input state.
sv::StateVector block_joint_state(const approx::TrigPolynomial& F, const sv::UnitaryOperator& u,
                                  const sv::StateVector& phi);

sv::StateVector apply_comb(const QPPComb& comb, const sv::UnitaryOperator& u, const sv::StateVector& joint);

/// <0|V|0> for a one-dimensional U = e^{ix}.
cplx comb_response(const QPPComb& comb, double x);

struct SynthesisOptions {
  double tolerance = 1e-6;  // max |response - F| on the check grid
  int check_points = 1024;
  int max_restarts = 40;
  std::uint64_t seed = 7;
};

struct SynthesisResult {
  QPPComb comb;
  double residual = 0.0;
  bool converged = false;
  int restarts_used = 0;
};

/// Numerical angle finding by least squares over the angle vector.
SynthesisResult synthesize_angles(const approx::TrigPolynomial& F, const SynthesisOptions& options = {});

PostSelectResult postselect_zero(const sv::StateVector& joint);

nlohmann::json to_json(const QPPComb& comb);
QPPComb comb_from_json(const nlohmann::json& j);

}  // namespace qite::qpp
