// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "qite/approx.hpp"
#include "qite/pauli.hpp"
#include "qite/qpp.hpp"
#include "qite/statevector.hpp"

namespace qite::ite {

struct ITEResult {
  sv::StateVector state;
  double success_prob = 0.0;
  double fidelity_to_exact = 0.0;
  double lambda_used = 0.0;
  double eps_used = 0.0;
  double C_used = 0.0;  // tau * (lambda - |lambda_0|)
  int degree = 0;
  double energy = 0.0;  // <H> on the post-selected state
};

enum class Mode { Block, Comb };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

/// Normalized e^{-tau H}|phi>, evaluated in the eigenbasis with e^{-tau lambda_0}
/// factored out.
sv::StateVector exact_ite(const pauli::SpectrumInfo& spec, const sv::StateVector& phi, double tau);
sv::StateVector exact_ite(const pauli::PauliSum& h, const sv::StateVector& phi, double tau);

struct PrepareOptions {
  double alpha = 0.85;
  Mode mode = Mode::Block;
  int degree_hint = 0;          // reuse a known-good degree when it still meets eps
  int max_comb_degree = 32;     // numerical angle synthesis is only attempted up to this degree
  bool require_eps = true;      // throw when the fit cannot reach eps_target
};

/// End-to-end pipeline with U = e^{-iH} from the exact eigendecomposition.
ITEResult prepare_ite(const pauli::PauliSum& h, const sv::StateVector& phi, double tau, double lam,
                      double eps_target, const PrepareOptions& options = {});

/// Pipeline core: applies an already fitted F through `u`, post-selects, and
/// compares with the exact ITE state of the spectrum `truth`.
ITEResult run_pipeline(const approx::Fit& fit, const sv::UnitaryOperator& u, const sv::StateVector& phi,
                       const pauli::SpectrumInfo& truth, const pauli::PauliSum& h, Mode mode,
                       int max_comb_degree = 32);

struct ProbBounds {
  double lower = 0.0;
  double upper = 1.0;
};

/// Lower bound gamma^2 alpha^2 e^{-2 tau (lambda_0 + lambda)} - eps. The upper
/// bound needs the spectral weights and is left at 1 by this overload.
ProbBounds success_prob_bounds(const approx::ApproxSpec& spec, double gamma, double lambda0, double eps);
/// Both bounds, with the upper one
///   alpha^2 e^{-2 tau lambda} ||e^{-tau H} phi||^2 + alpha eps e^{-tau lambda} ||e^{-tau H/2} phi||^2 + eps^2
/// evaluated on the exact spectrum. The upper bound presumes lambda >= |lambda_0|.
ProbBounds success_prob_bounds(const approx::ApproxSpec& spec, const pauli::SpectrumInfo& truth,
                               const sv::StateVector& phi, double eps);

/// Smoothed step used by the threshold search: 0 below a - w, 1 on [a, a + 1.5],
/// smooth edges, 0 beyond a + 2 (all within one period).
double step_template(double x, double width);

struct QpeOptions {
  std::optional<double> gamma_lower;  // defaults to the exact overlap
  double filter_eps = 1e-3;
};

struct QpeResult {
  double lambda = 0.0;     // estimate of |lambda_0| shifted up by `precision`
  double estimate = 0.0;   // midpoint estimate of |lambda_0|
  int nodes = 0;
  std::size_t shots_per_node = 0;
  int filter_degree = 0;
};

/// Threshold bisection with a step filter applied by QPP. Returns lambda in
/// [|lambda_0|, |lambda_0| + 2 precision] except with probability fail_prob.
QpeResult estimate_lambda_qpe_detailed(const pauli::PauliSum& h, const sv::StateVector& phi, double precision,
                                       double fail_prob, std::uint64_t seed, const QpeOptions& options = {});
double estimate_lambda_qpe(const pauli::PauliSum& h, const sv::StateVector& phi, double precision,
                           double fail_prob, std::uint64_t seed, const QpeOptions& options = {});

/// sqrt(0.5)|psi_0> + sqrt(0.5)|psi_perp>, with |psi_perp> the equal
/// superposition of the remaining eigenvectors. Overlap gamma^2 = 0.5.
sv::StateVector half_overlap_state(const pauli::SpectrumInfo& spec);

}  // namespace qite::ite
