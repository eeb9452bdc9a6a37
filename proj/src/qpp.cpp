// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/qpp.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>

namespace qite::qpp {

namespace {

using M2 = Eigen::Matrix2cd;
using Row2 = Eigen::RowVector2cd;
using Col2 = Eigen::Vector2cd;

M2 ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  M2 m;
  m << c, -s, s, c;
  return m;
}

M2 ry_prime(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  M2 m;
  m << -s / 2, -c / 2, c / 2, -s / 2;
  return m;
}

M2 rz(double t) {
  M2 m = M2::Zero();
  m(0, 0) = std::polar(1.0, -t / 2);
  m(1, 1) = std::polar(1.0, t / 2);
  return m;
}

M2 rz_prime(double t) {
  M2 m = M2::Zero();
  m(0, 0) = -0.5 * kI * std::polar(1.0, -t / 2);
  m(1, 1) = 0.5 * kI * std::polar(1.0, t / 2);
  return m;
}

M2 rotation(double ty, double tz) { return ry(ty) * rz(tz); }

sv::StateVector apply_ancilla(const sv::StateVector& s, double ty, double tz) {
  return sv::apply_single_qubit(s, 0, rotation(ty, tz));
}

// Response <0|V|0> at one phase and its gradient w.r.t. (theta_y, theta_z).
struct Responder {
  int layers;
  const double* ty;
  const double* tz;

  cplx value(double x) const {
    const cplx ux = std::polar(1.0, x);
    Row2 left(1.0, 0.0);
    left = left * rotation(ty[0], tz[0]);
    for (int l = 1; l <= layers; ++l) {
      left(0) *= std::conj(ux);
      left = left * rotation(ty[2 * l - 1], tz[2 * l - 1]);
      left(1) *= ux;
      left = left * rotation(ty[2 * l], tz[2 * l]);
    }
    return left(0);
  }

  // grad_y[j], grad_z[j] receive dF/dtheta for angle j.
  cplx gradient(double x, cplx* grad_y, cplx* grad_z) const {
    const int n = 2 * layers + 1;
    const cplx ux = std::polar(1.0, x);
    std::vector<M2> a(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = rotation(ty[j], tz[j]);

    // Factor order left to right: A_0, then per layer Dd, A_{2l-1}, D, A_{2l}.
    std::vector<Row2> lefts(static_cast<std::size_t>(n));
    Row2 left(1.0, 0.0);
    lefts[0] = left;
    left = left * a[0];
    for (int l = 1; l <= layers; ++l) {
      left(0) *= std::conj(ux);
      lefts[static_cast<std::size_t>(2 * l - 1)] = left;
      left = left * a[static_cast<std::size_t>(2 * l - 1)];
      left(1) *= ux;
      lefts[static_cast<std::size_t>(2 * l)] = left;
      left = left * a[static_cast<std::size_t>(2 * l)];
    }
    const cplx value = left(0);

    Col2 right(1.0, 0.0);
    for (int l = layers; l >= 1; --l) {
      const auto j2 = static_cast<std::size_t>(2 * l);
      grad_y[j2] = lefts[j2] * ry_prime(ty[j2]) * rz(tz[j2]) * right;
      grad_z[j2] = lefts[j2] * ry(ty[j2]) * rz_prime(tz[j2]) * right;
      right = a[j2] * right;
      right(1) *= ux;
      const auto j1 = static_cast<std::size_t>(2 * l - 1);
      grad_y[j1] = lefts[j1] * ry_prime(ty[j1]) * rz(tz[j1]) * right;
      grad_z[j1] = lefts[j1] * ry(ty[j1]) * rz_prime(tz[j1]) * right;
      right = a[j1] * right;
      right(0) *= std::conj(ux);
    }
    grad_y[0] = lefts[0] * ry_prime(ty[0]) * rz(tz[0]) * right;
    grad_z[0] = lefts[0] * ry(ty[0]) * rz_prime(tz[0]) * right;
    return value;
  }
};

struct CombResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  int layers;
  RVec xs;
  Vec target;

  int inputs() const { return 2 * (2 * layers + 1); }
  int values() const { return 2 * static_cast<int>(xs.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    const int n = 2 * layers + 1;
    const Responder r{layers, p.data(), p.data() + n};
    const Eigen::Index m = xs.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      const cplx d = r.value(xs(i)) - target(i);
      f(i) = d.real();
      f(m + i) = d.imag();
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    const int n = 2 * layers + 1;
    const Responder r{layers, p.data(), p.data() + n};
    const Eigen::Index m = xs.size();
    std::vector<cplx> gy(static_cast<std::size_t>(n)), gz(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < m; ++i) {
      r.gradient(xs(i), gy.data(), gz.data());
      for (int j = 0; j < n; ++j) {
        jac(i, j) = gy[static_cast<std::size_t>(j)].real();
        jac(m + i, j) = gy[static_cast<std::size_t>(j)].imag();
        jac(i, n + j) = gz[static_cast<std::size_t>(j)].real();
        jac(m + i, n + j) = gz[static_cast<std::size_t>(j)].imag();
      }
    }
    return 0;
  }
};

double max_residual(const QPPComb& comb, const approx::TrigPolynomial& F, int points) {
  const RVec xs = RVec::LinSpaced(points, -std::numbers::pi, std::numbers::pi * (1.0 - 2.0 / points));
  const Vec target = F.evaluate(xs);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(comb_response(comb, xs(i)) - target(i)));
  return worst;
}

}  // namespace

void QPPComb::validate() const {
  if (slots < 0 || slots % 2 != 0) throw std::invalid_argument("comb slot count must be even and non-negative");
  const auto expected = static_cast<std::size_t>(slots + 1);
  if (theta_y.size() != expected || theta_z.size() != expected) {
    throw std::invalid_argument("comb angle lists must have length slots + 1");
  }
}

sv::StateVector apply_block(const approx::TrigPolynomial& F, const sv::UnitaryOperator& u, const sv::StateVector& phi) {
  if (phi.qubit_count() != u.qubit_count()) throw std::invalid_argument("state and unitary registers differ");
  const int L = F.degree();
  Vec acc = F.coeff(0) * phi.amplitudes();
  Vec fwd = phi.amplitudes();
  Vec bwd = phi.amplitudes();
  for (int k = 1; k <= L; ++k) {
    fwd = u.apply(fwd);
    acc += F.coeff(k) * fwd;
    bwd = u.apply_adjoint(bwd);
    acc += F.coeff(-k) * bwd;
  }
  return sv::StateVector::unnormalized_from(std::move(acc));
}

sv::StateVector block_joint_state(const approx::TrigPolynomial& F, const sv::UnitaryOperator& u,
                                  const sv::StateVector& phi) {
  const sv::StateVector top = apply_block(F, u, phi);
  const double p0 = top.amplitudes().squaredNorm();
  if (p0 > 1.0 + 1e-9) throw std::domain_error("block is not a contraction on this input");
  const Eigen::Index dim = phi.dimension();
  Vec joint(2 * dim);
  joint.head(dim) = top.amplitudes();
  joint.tail(dim) = std::sqrt(std::max(0.0, 1.0 - p0)) * phi.amplitudes();
  joint /= joint.norm();
  return sv::StateVector(std::move(joint));
}

sv::StateVector apply_comb(const QPPComb& comb, const sv::UnitaryOperator& u, const sv::StateVector& joint) {
  comb.validate();
  if (joint.qubit_count() != u.qubit_count() + 1) throw std::invalid_argument("joint state must carry one ancilla");
  sv::StateVector s = joint;
  for (int l = comb.layers(); l >= 1; --l) {
    const auto j2 = static_cast<std::size_t>(2 * l);
    const auto j1 = static_cast<std::size_t>(2 * l - 1);
    s = apply_ancilla(s, comb.theta_y[j2], comb.theta_z[j2]);
    s = sv::apply_controlled(u, s, 1, false);
    s = apply_ancilla(s, comb.theta_y[j1], comb.theta_z[j1]);
    s = sv::apply_controlled(u, s, 0, true);
  }
  return apply_ancilla(s, comb.theta_y[0], comb.theta_z[0]);
}

cplx comb_response(const QPPComb& comb, double x) {
  comb.validate();
  return Responder{comb.layers(), comb.theta_y.data(), comb.theta_z.data()}.value(x);
}

SynthesisResult synthesize_angles(const approx::TrigPolynomial& F, const SynthesisOptions& options) {
  if (F.sup_norm_circle() > 1.0 + 1e-12) throw std::invalid_argument("synthesis needs sup|F| <= 1");
  const int L = F.degree();
  SynthesisResult result;
  result.comb.slots = 2 * L;

  if (L == 0) {
    const cplx c = F.coeff(0);
    result.comb.theta_y = {2.0 * std::acos(std::min(1.0, std::abs(c)))};
    result.comb.theta_z = {-2.0 * std::arg(c)};
    result.residual = max_residual(result.comb, F, options.check_points);
    result.converged = result.residual <= options.tolerance;
    return result;
  }

  CombResidual functor;
  functor.layers = L;
  const int fit_points = 4 * L + 8;
  functor.xs = RVec::LinSpaced(fit_points, -std::numbers::pi, std::numbers::pi * (1.0 - 2.0 / fit_points));
  functor.target = F.evaluate(functor.xs);

  const int n = 2 * L + 1;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  result.residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < options.max_restarts; ++attempt) {
    Eigen::VectorXd p(2 * n);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = angle(rng);
    Eigen::LevenbergMarquardt<CombResidual> lm(functor);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.gtol = 0.0;
    lm.parameters.maxfev = 400 * (n + 1);
    lm.minimize(p);

    QPPComb candidate;
    candidate.slots = 2 * L;
    candidate.theta_y.assign(p.data(), p.data() + n);
    candidate.theta_z.assign(p.data() + n, p.data() + 2 * n);
    const double res = max_residual(candidate, F, options.check_points);
    result.restarts_used = attempt + 1;
    if (res < result.residual) {
      result.residual = res;
      result.comb = std::move(candidate);
    }
    if (result.residual <= options.tolerance) break;
  }
  result.converged = result.residual <= options.tolerance;
  return result;
}

PostSelectResult postselect_zero(const sv::StateVector& joint) {
  if (joint.qubit_count() < 2) throw std::invalid_argument("joint state needs an ancilla and a system qubit");
  const Eigen::Index half = joint.dimension() / 2;
  const Vec branch = joint.amplitudes().head(half);
  const double total = joint.amplitudes().squaredNorm();
  const double p = branch.squaredNorm() / total;
  if (!(p >= 1e-300)) throw std::domain_error("post-selection failed: ancilla-0 branch has zero weight");
  return {sv::StateVector(branch / branch.norm()), p};
}

nlohmann::json to_json(const QPPComb& comb) {
  return {{"slots", comb.slots}, {"theta_y", comb.theta_y}, {"theta_z", comb.theta_z}};
}

QPPComb comb_from_json(const nlohmann::json& j) {
  QPPComb c;
  c.slots = j.at("slots").get<int>();
  c.theta_y = j.at("theta_y").get<std::vector<double>>();
  c.theta_z = j.at("theta_z").get<std::vector<double>>();
  c.validate();
  return c;
}

}  // namespace qite::qpp
