// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <limits>

#include <json.hpp>

#include "qite/types.hpp"

namespace qite::approx {

/// Parameters of the regularized target
///   g(x) = rho(x) * exp(tau * (x - lambda - mu)),   alpha = exp(-tau * mu),
/// which equals alpha * exp(tau * (x - lambda)) on [-1, lambda].
struct ApproxSpec {
  double tau = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  int degree = 0;
  double eps = std::numeric_limits<double>::quiet_NaN();
};

/// Builds a spec from (tau, lambda, alpha), choosing mu with choose_mu().
ApproxSpec make_spec(double tau, double lambda, double alpha);

/// Throws std::invalid_argument when a structural invariant is violated.
/// lambda may exceed 1 by at most 1/tau so that the start of the loss search
/// interval [1/tau, 1 + 1/tau] is representable.
void validate(const ApproxSpec& spec);

/// Threshold that alpha must exceed for a given tau; +inf when no alpha works.
double alpha_lower_bound(double tau);

struct MuChoice {
  double mu = 0.0;
  bool boundary = false;  // alpha == 1, mu == 0: no usable bump width
};
MuChoice choose_mu(double tau, double alpha);

double beta(double z);
double bump_rho(double x, double lam, double mu);
double target_g(double x, const ApproxSpec& spec);
/// alpha * exp(tau * (x - lambda)), the function g reproduces on [-1, lambda].
double target_exponential(double x, const ApproxSpec& spec);

/// F(x) = sum_{k=-L..L} c_k e^{ikx}.
class TrigPolynomial {
 public:
  TrigPolynomial() : TrigPolynomial(Vec::Zero(1)) {}
  /// coeffs(k + L) holds c_k; the length must be odd.
  explicit TrigPolynomial(Vec coeffs);

  int degree() const { return degree_; }
  const Vec& coeffs() const { return coeffs_; }
  cplx coeff(int k) const;

  cplx evaluate(double x) const;
  Vec evaluate(const RVec& xs) const;
  /// Maximum of |F| on a uniform grid of the full circle with at least
  /// `min_points` nodes (FFT-evaluated).
  double sup_norm_circle(int min_points = 4096) const;

  TrigPolynomial scaled(cplx factor) const { return TrigPolynomial(coeffs_ * factor); }

 private:
  Vec coeffs_;
  int degree_ = 0;
};

/// Fourier coefficients of a 2*pi-periodic function by uniform quadrature on
/// a grid of at least 32 * degree nodes, truncated at |k| <= degree. If the
/// result exceeds 1 in modulus anywhere on the circle grid it is rescaled to
/// sit just below 1.
TrigPolynomial fourier_fit(const std::function<double(double)>& g, int degree);
TrigPolynomial fourier_fit(const ApproxSpec& spec, int degree);

/// max |f(x) - F(x)| over `points` equally spaced nodes of [a, b] (endpoints included).
double sup_error(const std::function<cplx(double)>& f_exact, const TrigPolynomial& F, double a, double b,
                 int points = 10000);
/// Sup error of F against the exponential target on [-1, lambda].
double fit_error(const ApproxSpec& spec, const TrigPolynomial& F, int points = 10000);

inline constexpr double kMinEpsTarget = 1e-10;
inline constexpr int kMaxDegreeFactor = 1024;

struct Fit {
  ApproxSpec spec;  // degree and eps filled in
  TrigPolynomial poly;
  bool reached = false;  // eps <= requested target
};

/// Smallest degree in [ceil(tau), 1024 * ceil(tau)] whose fit meets eps_target,
/// found by doubling then bisection. Reports the best effort when unreachable.
Fit fit_to_target(const ApproxSpec& spec, double eps_target);

/// Fits at `degree_hint` first and keeps it if it meets eps_target. Otherwise
/// returns the smallest degree above the hint that does, which need not be the
/// global minimum. A non-positive hint means fit_to_target().
Fit fit_with_hint(const ApproxSpec& spec, double eps_target, int degree_hint);

nlohmann::json to_json(const TrigPolynomial& F);
TrigPolynomial trig_polynomial_from_json(const nlohmann::json& j);

}  // namespace qite::approx
