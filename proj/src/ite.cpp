// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/ite.hpp"

#include <cmath>
#include <stdexcept>

namespace qite::ite {

Mode mode_from_string(const std::string& s) {
  if (s == "block") return Mode::Block;
  if (s == "comb") return Mode::Comb;
  throw std::invalid_argument("unknown mode '" + s + "' (expected block or comb)");
}

std::string to_string(Mode m) { return m == Mode::Block ? "block" : "comb"; }

sv::StateVector exact_ite(const pauli::SpectrumInfo& spec, const sv::StateVector& phi, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be non-negative");
  if (phi.dimension() != spec.dimension()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
  Vec c = spec.coefficients(phi.amplitudes());
  // Shift by the lowest energy that actually carries weight so the largest
  // factor is exactly 1 and nothing overflows.
  double floor_energy = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (std::abs(c(j)) > 0.0) floor_energy = std::min(floor_energy, spec.eigenvalues(j));
  }
  if (!std::isfinite(floor_energy)) throw std::domain_error("zero input state");
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::exp(-tau * (spec.eigenvalues(j) - floor_energy));
  Vec out = spec.eigenvectors * c;
  const double n = out.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("imaginary-time evolved state has zero norm");
  return sv::StateVector(out / n);
}

sv::StateVector exact_ite(const pauli::PauliSum& h, const sv::StateVector& phi, double tau) {
  return exact_ite(pauli::diagonalize(h), phi, tau);
}

ITEResult run_pipeline(const approx::Fit& fit, const sv::UnitaryOperator& u, const sv::StateVector& phi,
                       const pauli::SpectrumInfo& truth, const pauli::PauliSum& h, Mode mode, int max_comb_degree) {
  qpp::PostSelectResult post;
  if (mode == Mode::Block) {
    const sv::StateVector v = qpp::apply_block(fit.poly, u, phi);
    const double p = v.amplitudes().squaredNorm();
    if (!(p >= 1e-300)) throw std::domain_error("post-selection failed: zero success probability");
    post = {v.normalized(), p};
  } else {
    if (fit.poly.degree() > max_comb_degree) {
      throw std::invalid_argument("comb mode supports degree <= " + std::to_string(max_comb_degree) + ", fit needs " +
                                  std::to_string(fit.poly.degree()));
    }
    const qpp::SynthesisResult syn = qpp::synthesize_angles(fit.poly);
    if (!syn.converged) {
      throw std::runtime_error("angle synthesis did not converge (residual " + std::to_string(syn.residual) + ")");
    }
    Vec joint = Vec::Zero(2 * phi.dimension());
    joint.head(phi.dimension()) = phi.amplitudes();
    post = qpp::postselect_zero(qpp::apply_comb(syn.comb, u, sv::StateVector(std::move(joint))));
  }

  ITEResult r{post.state, post.success_prob};
  const sv::StateVector target = exact_ite(truth, phi, fit.spec.tau);
  r.fidelity_to_exact = sv::fidelity(target, post.state);
  r.lambda_used = fit.spec.lambda;
  r.eps_used = fit.spec.eps;
  r.C_used = fit.spec.tau * (fit.spec.lambda - std::abs(truth.ground_energy));
  r.degree = fit.poly.degree();
  r.energy = h.expectation(post.state.amplitudes());
  return r;
}

ITEResult prepare_ite(const pauli::PauliSum& h, const sv::StateVector& phi, double tau, double lam,
                      double eps_target, const PrepareOptions& options) {
  const pauli::SpectrumInfo truth = pauli::diagonalize(h);
  const approx::ApproxSpec spec = approx::make_spec(tau, lam, options.alpha);
  const approx::Fit fit = approx::fit_with_hint(spec, eps_target, options.degree_hint);
  if (options.require_eps && !fit.reached) {
    throw std::runtime_error("approximation failure: best eps " + std::to_string(fit.spec.eps) + " above target " +
                             std::to_string(eps_target));
  }
  const sv::DenseUnitary u(truth.evolution(1.0));
  return run_pipeline(fit, u, phi, truth, h, options.mode, options.max_comb_degree);
}

ProbBounds success_prob_bounds(const approx::ApproxSpec& spec, double gamma, double lambda0, double eps) {
  ProbBounds b;
  b.lower = gamma * gamma * spec.alpha * spec.alpha * std::exp(-2.0 * spec.tau * (lambda0 + spec.lambda)) - eps;
  return b;
}

ProbBounds success_prob_bounds(const approx::ApproxSpec& spec, const pauli::SpectrumInfo& truth,
                               const sv::StateVector& phi, double eps) {
  const Vec c = truth.coefficients(phi.amplitudes());
  const double gamma = std::abs(c(0));
  ProbBounds b = success_prob_bounds(spec, gamma, truth.ground_energy, eps);
  // Both norms are computed relative to e^{tau * lambda} to stay finite.
  double full = 0.0;
  double half = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double w = std::norm(c(j));
    full += w * std::exp(-2.0 * spec.tau * (truth.eigenvalues(j) + spec.lambda));
    half += w * std::exp(-spec.tau * (truth.eigenvalues(j) + spec.lambda));
  }
  b.upper = spec.alpha * spec.alpha * full + spec.alpha * eps * half + eps * eps;
  return b;
}

double step_template(double x, double width) {
  if (x >= 0.0 && x <= 1.5) return 1.0;
  if (x > -width && x < 0.0) return approx::beta((x + width) / width);
  if (x > 1.5 && x < 2.0) return approx::beta((2.0 - x) / 0.5);
  return 0.0;
}

namespace {

approx::TrigPolynomial shifted(const approx::TrigPolynomial& F, double a) {
  // F_a(x) = F(x - a)  <=>  c_k -> c_k e^{-ika}
  Vec c = F.coeffs();
  const int L = F.degree();
  for (int k = -L; k <= L; ++k) c(k + L) *= std::polar(1.0, -k * a);
  return approx::TrigPolynomial(std::move(c));
}

}  // namespace

QpeResult estimate_lambda_qpe_detailed(const pauli::PauliSum& h, const sv::StateVector& phi, double precision,
                                       double fail_prob, std::uint64_t seed, const QpeOptions& options) {
  if (!(precision > 0.0) || precision >= 1.0) throw std::invalid_argument("precision must lie in (0, 1)");
  if (!(fail_prob > 0.0 && fail_prob < 1.0)) throw std::invalid_argument("fail_prob must lie in (0, 1)");
  const pauli::SpectrumInfo truth = pauli::diagonalize(h);
  const double gamma = options.gamma_lower.value_or(pauli::overlap_gamma(truth, phi));
  if (!(gamma > 0.0)) throw std::invalid_argument("overlap with the ground state must be positive");
  const double g2 = gamma * gamma;

  // Filter template and its fitted polynomial.
  const double w = precision / 2.0;
  const double eta = std::min(options.filter_eps, g2 / 16.0);
  auto tmpl = [w](double x) { return step_template(x, w); };
  approx::TrigPolynomial filter;
  for (int degree = 16;; degree *= 2) {
    filter = approx::fourier_fit(tmpl, degree);
    const double err = approx::sup_error([&](double x) { return cplx(tmpl(x), 0.0); }, filter, -2.0 - 2.0 * w, 1.0);
    if (err <= eta) break;
    if (degree >= (1 << 17)) throw std::runtime_error("step filter fit did not reach the requested accuracy");
  }

  double lo = 0.0;
  double hi = 1.0 + 2.0 * w;
  const int nodes = 1 + static_cast<int>(std::ceil(std::log2((hi - lo) / (precision / 2.0))));
  const double margin = g2 / 2.0 - 2.0 * eta - eta * eta;
  const double delta = fail_prob / nodes;
  const auto shots = static_cast<std::size_t>(std::ceil(std::log(2.0 / delta) / (2.0 * margin * margin)));
  const sv::DenseUnitary u(truth.evolution(1.0));

  int node = 0;
  auto passes = [&](double a) {
    const sv::StateVector joint = qpp::block_joint_state(shifted(filter, a), u, phi);
    const auto counts = sv::sample_counts(joint, shots, sv::derive_seed(seed, static_cast<std::uint64_t>(node++)));
    std::uint64_t zero = 0;
    for (std::size_t i = 0; i < counts.size() / 2; ++i) zero += counts[i];
    return static_cast<double>(zero) / static_cast<double>(shots) >= g2 / 2.0;
  };

  if (!passes(lo)) throw std::runtime_error("bisection inconsistency: filter at threshold 0 rejects the input");
  while (hi - lo > precision / 2.0) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  QpeResult r;
  // The ground eigenphase lies in [lo - w, hi).
  r.estimate = 0.5 * (lo - w + hi);
  r.lambda = r.estimate + precision;
  r.nodes = node;
  r.shots_per_node = shots;
  r.filter_degree = filter.degree();
  return r;
}

double estimate_lambda_qpe(const pauli::PauliSum& h, const sv::StateVector& phi, double precision,
                           double fail_prob, std::uint64_t seed, const QpeOptions& options) {
  return estimate_lambda_qpe_detailed(h, phi, precision, fail_prob, seed, options).lambda;
}

sv::StateVector half_overlap_state(const pauli::SpectrumInfo& spec) {
  const Eigen::Index d = spec.dimension();
  if (d < 2) throw std::invalid_argument("need at least two eigenvectors");
  Vec perp = Vec::Zero(d);
  for (Eigen::Index j = 1; j < d; ++j) perp += spec.eigenvectors.col(j);
  perp /= perp.norm();
  Vec v = std::sqrt(0.5) * spec.eigenvectors.col(0) + std::sqrt(0.5) * perp;
  return sv::StateVector(v / v.norm());
}

}  // namespace qite::ite
