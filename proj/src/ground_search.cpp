// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/ground_search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qite/qpp.hpp"

namespace qite::ground {

namespace {

const Eigen::Matrix2cd& hadamard() {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    const double r = 1.0 / std::sqrt(2.0);
    m << r, r, r, -r;
    return m;
  }();
  return h;
}

const Eigen::Matrix2cd& s_dagger() {
  static const Eigen::Matrix2cd s = [] {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0, 0.0, -kI;
    return m;
  }();
  return s;
}

// Squared moduli of f(-lambda_j) weighted by |c_j|^2, i.e. the per-eigenstate
// weight of f(U)|phi> with U = e^{-iH}.
template <typename F>
RVec filtered_weights(const pauli::SpectrumInfo& truth, const sv::StateVector& phi, F&& f) {
  const Vec c = truth.coefficients(phi.amplitudes());
  RVec w(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) w(j) = std::norm(c(j)) * std::norm(f(-truth.eigenvalues(j)));
  return w;
}

}  // namespace

Interval agresti_coull(double successes, double trials, double z) {
  if (!(trials >= 0.0) || successes < 0.0 || successes > trials) {
    throw std::invalid_argument("invalid binomial counts");
  }
  const double z2 = z * z;
  const double n = trials + z2;
  const double p = (successes + z2 / 2.0) / n;
  const double half = z * std::sqrt(p * (1.0 - p) / n);
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

EnergyEstimate energy_from_samples(const std::vector<const LossEstimate*>& sources) {
  if (sources.empty()) throw std::invalid_argument("no loss estimates to pool");
  double plus = 0.0;
  double total = 0.0;
  const double S = sources.front()->S;
  for (const LossEstimate* e : sources) {
    plus += e->zero_plus;
    total += e->zero_count();
  }
  EnergyEstimate out;
  out.samples = total;
  if (!(total > 0.0)) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.ci = {-S, S};
    return out;
  }
  const double q = plus / total;
  const Interval p = agresti_coull(plus, total);
  out.value = S * (2.0 * q - 1.0);
  out.ci = {S * (2.0 * p.low - 1.0), S * (2.0 * p.high - 1.0)};
  return out;
}

double loss_exact(const pauli::SpectrumInfo& truth, const sv::StateVector& phi, const approx::ApproxSpec& spec,
                  const approx::TrigPolynomial* F) {
  approx::validate(spec);
  const RVec w = F ? filtered_weights(truth, phi, [&](double x) { return F->evaluate(x); })
                   : filtered_weights(truth, phi, [&](double x) { return cplx(approx::target_g(x, spec)); });
  return w.dot(truth.eigenvalues);
}

double loss_exact(const pauli::PauliSum& h, const sv::StateVector& phi, const approx::ApproxSpec& spec, bool use_F) {
  const pauli::SpectrumInfo truth = pauli::diagonalize(h);
  if (!use_F) return loss_exact(truth, phi, spec, nullptr);
  if (spec.degree < 1) throw std::invalid_argument("use_F needs spec.degree >= 1");
  const approx::TrigPolynomial F = approx::fourier_fit(spec, spec.degree);
  return loss_exact(truth, phi, spec, &F);
}

std::size_t shot_budget(int L, double Lam, double tau, double B) {
  if (L <= 0 || !(Lam > 0.0) || !(tau > 0.0) || !(B > 0.0)) {
    throw std::invalid_argument("shot budget inputs must be positive");
  }
  const double m = std::ceil(8.0 * L * Lam * Lam * tau * tau * tau / (B * B));
  if (!(m < static_cast<double>(std::numeric_limits<std::size_t>::max()))) {
    throw std::overflow_error("shot budget exceeds the counter range");
  }
  return static_cast<std::size_t>(m);
}

sv::StateVector rotate_to_z_basis(const sv::StateVector& joint, const pauli::PauliString& sigma) {
  if (joint.qubit_count() != sigma.qubit_count() + 1) {
    throw std::invalid_argument("joint state must be one ancilla plus the Pauli string's register");
  }
  sv::StateVector out = joint;
  for (int q = 0; q < sigma.qubit_count(); ++q) {
    switch (sigma.op(q)) {
      case 'X':
        out = sv::apply_single_qubit(out, q + 1, hadamard());
        break;
      case 'Y':
        out = sv::apply_single_qubit(out, q + 1, s_dagger());
        out = sv::apply_single_qubit(out, q + 1, hadamard());
        break;
      default:
        break;
    }
  }
  return out;
}

double sample_value(const pauli::PauliSum& h, int term, const sv::MeasurementRecord& record) {
  if (term < 0 || term >= h.term_count()) throw std::out_of_range("term index out of range");
  if (record.ancilla_bit != 0) return 0.0;
  const pauli::PauliTerm& t = h.terms()[static_cast<std::size_t>(term)];
  const double sign = t.coeff > 0.0 ? 1.0 : (t.coeff < 0.0 ? -1.0 : 0.0);
  const int parity = std::popcount(record.system_bits & t.string.support_mask()) & 1;
  return sign * h.coeff_l1() * (parity ? -1.0 : 1.0);
}

LossEstimate estimate_loss(const pauli::PauliSum& h, const sv::StateVector& joint, int degree, std::size_t shots,
                           std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("empty sample set");
  if (joint.qubit_count() != h.qubit_count() + 1) throw std::invalid_argument("joint state size mismatch");
  std::vector<double> weights;
  weights.reserve(h.terms().size());
  for (const auto& t : h.terms()) weights.push_back(std::abs(t.coeff));
  const std::vector<std::uint64_t> per_term = sv::sample_categorical(weights, shots, sv::derive_seed(seed, 0));

  LossEstimate out;
  out.S = h.coeff_l1();
  out.seed = seed;
  out.degree = degree;
  out.shots_used = shots;
  double sum = 0.0;
  const int m = joint.qubit_count();
  for (int l = 0; l < h.term_count(); ++l) {
    const std::uint64_t m_l = per_term[static_cast<std::size_t>(l)];
    if (m_l == 0) continue;
    const sv::StateVector rotated = rotate_to_z_basis(joint, h.terms()[static_cast<std::size_t>(l)].string);
    const std::vector<std::uint64_t> counts =
        sv::sample_counts(rotated, m_l, sv::derive_seed(seed, static_cast<std::uint64_t>(l) + 1));
    for (std::size_t idx = 0; idx < counts.size(); ++idx) {
      if (counts[idx] == 0) continue;
      const sv::MeasurementRecord rec = sv::decode(idx, m);
      const double x = sample_value(h, l, rec);
      const double n = static_cast<double>(counts[idx]);
      sum += x * n;
      if (rec.ancilla_bit == 0) (x > 0.0 ? out.zero_plus : out.zero_minus) += n;
    }
  }
  out.value = sum / static_cast<double>(shots);
  return out;
}

LossEstimate estimate_loss(const pauli::PauliSum& h, const sv::StateVector& phi, const approx::ApproxSpec& spec,
                           std::size_t shots, std::uint64_t seed) {
  approx::validate(spec);
  if (spec.degree < 1) throw std::invalid_argument("spec.degree must be at least 1");
  const approx::TrigPolynomial F = approx::fourier_fit(spec, spec.degree);
  const sv::DenseUnitary u(pauli::diagonalize(h).evolution(1.0));
  return estimate_loss(h, qpp::block_joint_state(F, u, phi), spec.degree, shots, seed);
}

LossOracle::LossOracle(pauli::PauliSum h, sv::StateVector phi, double alpha, double eps_target, bool exact)
    : h_(std::move(h)),
      phi_(std::move(phi)),
      truth_(pauli::diagonalize(h_)),
      u_(truth_.evolution(1.0)),
      alpha_(alpha),
      eps_target_(eps_target),
      exact_(exact) {
  if (phi_.qubit_count() != h_.qubit_count()) throw std::invalid_argument("input state size mismatch");
  if (!(eps_target_ > 0.0)) throw std::invalid_argument("loss accuracy target must be positive");
}

approx::Fit LossOracle::fit(double tau, double lambda) {
  const approx::ApproxSpec spec = approx::make_spec(tau, lambda, alpha_);
  const int hint = degree_ratio_ > 0.0 ? static_cast<int>(std::ceil(degree_ratio_ * tau)) : 0;
  approx::Fit f = approx::fit_with_hint(spec, eps_target_, hint);
  if (!f.reached) {
    throw std::runtime_error("approximation failure at tau " + std::to_string(tau) + ", lambda " +
                             std::to_string(lambda) + ": best eps " + std::to_string(f.spec.eps));
  }
  if (f.spec.degree != hint) degree_ratio_ = f.spec.degree / tau;
  return f;
}

LossEstimate LossOracle::estimate(double tau, double lambda, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("empty sample set");
  const approx::Fit f = fit(tau, lambda);
  if (!exact_) {
    return estimate_loss(h_, qpp::block_joint_state(f.poly, u_, phi_), f.spec.degree, shots, seed);
  }
  LossEstimate out;
  out.exact = true;
  out.seed = seed;
  out.degree = f.spec.degree;
  out.shots_used = shots;
  out.S = h_.coeff_l1();
  out.value = loss_exact(truth_, phi_, f.spec, &f.poly);
  const double p0 = filtered_weights(truth_, phi_, [&](double x) { return f.poly.evaluate(x); }).sum();
  if (p0 > 0.0) {
    const double n0 = static_cast<double>(shots) * p0;
    const double energy = out.value / p0;
    out.zero_plus = std::clamp(n0 * (1.0 + energy / out.S) / 2.0, 0.0, n0);
    out.zero_minus = n0 - out.zero_plus;
  }
  return out;
}

StartMode start_mode_from_string(const std::string& s) {
  if (s == "scan") return StartMode::Scan;
  if (s == "printed") return StartMode::Printed;
  throw std::invalid_argument("unknown start mode '" + s + "' (expected scan or printed)");
}

std::string to_string(StartMode m) { return m == StartMode::Scan ? "scan" : "printed"; }

StartResult binary_search_start(const std::function<double(double)>& loss, double tau, double B, StartMode mode) {
  if (!(tau > 0.0) || !(B > 0.0)) throw std::invalid_argument("tau and B must be positive");
  StartResult out;
  const double lo = 1.0 / tau;
  const double hi = 1.0 + 1.0 / tau;

  if (mode == StartMode::Scan) {
    const double step = 1.0 / (2.0 * tau);
    for (int k = 0;; ++k) {
      const double lam = hi - k * step;
      if (lam < lo - 1e-12) break;
      ++out.evaluations;
      if (loss(lam) <= -B) {
        out.lambda = lam;
        out.threshold_met = true;
        return out;
      }
    }
    out.lambda = lo;
    out.diagnostic = "loss stays above -B on the whole grid over [1/tau, 1 + 1/tau]; B is too large for this input";
    return out;
  }

  double l = lo;
  double r = hi;
  ++out.evaluations;
  if (loss(r) <= -B) {
    out.lambda = r;
    out.threshold_met = true;
    return out;
  }
  ++out.evaluations;
  if (loss(l) > -B) {
    out.lambda = l;
    out.diagnostic = "loss is above -B at both ends of [1/tau, 1 + 1/tau]; returned the lower end";
    return out;
  }
  const int rounds = static_cast<int>(std::ceil(std::log2(tau)));
  int i = 0;
  while (i <= rounds) {
    ++i;
    ++out.evaluations;
    const double width = std::ldexp(1.0, -i);
    if (loss(l) > -B) {
      r = l;
      l = l - width;
    } else {
      l = r - width;
    }
  }
  out.halvings = i;
  out.lambda = r - 1.0 / (2.0 * tau);
  out.threshold_met = true;
  return out;
}

std::string to_string(Branch b) { return b == Branch::LeftShrink ? "left" : "right"; }

Decision ternary_decide(double loss_lt, double loss_r, double tau, double delta) {
  if (loss_r == 0.0) throw std::domain_error("loss at lambda_r is zero");
  if (!(tau > 0.0) || !(delta > 0.0)) throw std::invalid_argument("tau and delta must be positive");
  Decision d;
  d.r = (loss_lt - loss_r) / loss_r;
  const double e = std::exp(4.0 * tau * delta);
  d.branch = std::abs(d.r - (e - 1.0)) > (e + 1.0) / tau ? Branch::LeftShrink : Branch::RightShrink;
  return d;
}

Decision ternary_decide(const LossEstimate& loss_lt, const LossEstimate& loss_r, double tau, double delta) {
  return ternary_decide(loss_lt.value, loss_r.value, tau, delta);
}

bool convergence_test_X(const std::vector<EnergyEstimate>& history) {
  if (history.size() < 2) throw std::invalid_argument("convergence test needs two energy estimates");
  const EnergyEstimate& prev = history[history.size() - 2];
  const EnergyEstimate& last = history.back();
  return prev.ci.contains(last.value) && last.ci.contains(prev.value);
}

int ternary_iteration_bound(double tau) {
  if (!(tau > 0.75)) throw std::invalid_argument("tau must exceed 3/4");
  return static_cast<int>(std::ceil(std::log(4.0 * tau / 3.0) / std::log(1.5)));
}

SearchResult run_adaptive_search(const pauli::PauliSum& h, const sv::StateVector& phi, double tau0, double dt,
                                 double B, std::size_t shots_override, std::uint64_t seed, SearchOptions options) {
  if (!(tau0 > 0.0) || !(dt >= 0.0) || !(B > 0.0)) throw std::invalid_argument("need tau0 > 0, dt >= 0, B > 0");
  if (options.max_iterations < 1) throw std::invalid_argument("iteration cap must be positive");
  const double eps = options.eps_target > 0.0 ? options.eps_target : std::min(1e-4, B / (16.0 * tau0));
  LossOracle oracle(h, phi, options.alpha, eps, options.exact_loss);

  const auto shots_at = [&](double tau) {
    if (shots_override > 0) return shots_override;
    const double t = options.budget == BudgetPolicy::InitialTau ? tau0 : tau;
    return shot_budget(h.term_count(), h.max_abs_coeff(), t, B);
  };

  SearchResult res;
  std::uint64_t stream = 0;
  const auto run_estimate = [&](double tau, double lambda) {
    const std::size_t shots = shots_at(tau);
    LossEstimate e = oracle.estimate(tau, lambda, shots, sv::derive_seed(seed, stream++));
    res.total_queries += static_cast<double>(shots) * 2.0 * e.degree;
    return e;
  };

  SearchState st;
  st.tau = tau0;
  st.dt = dt;
  st.B = B;
  res.start = binary_search_start([&](double lam) { return run_estimate(st.tau, lam).value; }, st.tau, B,
                                  options.start);
  if (!res.start.threshold_met) throw std::runtime_error("start search failed: " + res.start.diagnostic);

  st.lambda_l = 0.0;
  st.lambda_r = res.start.lambda;
  const auto converged = [&] {
    return st.energy_history.size() >= 2 && convergence_test_X(st.energy_history);
  };
  while (st.lambda_r - st.lambda_l > 1.0 / st.tau || !converged()) {
    if (st.iteration >= options.max_iterations) {
      throw std::runtime_error("adaptive search exceeded " + std::to_string(options.max_iterations) + " iterations");
    }
    st.delta = (st.lambda_r - st.lambda_l) / 3.0;
    const double lambda_lt = st.lambda_l + st.delta;
    const double lambda_rt = st.lambda_r - st.delta;
    const LossEstimate est_lt = run_estimate(st.tau, lambda_lt);
    const LossEstimate est_r = run_estimate(st.tau, st.lambda_r);
    const Decision d = ternary_decide(est_lt, est_r, st.tau, st.delta);

    IterationRecord rec;
    rec.i = st.iteration;
    rec.tau = st.tau;
    rec.r = d.r;
    rec.branch = d.branch;
    rec.shots = est_r.shots_used;
    rec.degree = std::max(est_lt.degree, est_r.degree);
    if (d.branch == Branch::LeftShrink) {
      rec.energy = energy_from_samples({&est_r});
      st.lambda_l = lambda_lt;
    } else {
      rec.energy = energy_from_samples({&est_lt, &est_r});
      st.lambda_r = lambda_rt;
    }
    rec.lambda_l = st.lambda_l;
    rec.lambda_r = st.lambda_r;
    rec.cumulative_queries = res.total_queries;
    st.energy_history.push_back(rec.energy);
    res.records.push_back(rec);

    st.tau += st.dt;
    ++st.iteration;
  }

  res.tau = st.tau;
  res.lambda = st.lambda_r;
  res.energy = st.energy_history.back();
  res.ternary_iterations = st.iteration;
  res.final_state = st;
  return res;
}

}  // namespace qite::ground
