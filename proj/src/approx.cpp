// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/approx.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

namespace qite::approx {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex DFT of `data` (sign -1 forward, +1 backward), unnormalized.
void dft(std::vector<cplx>& data, int sign) {
  static_assert(sizeof(cplx) == sizeof(fftw_complex));
  const int n = static_cast<int>(data.size());
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, ptr, ptr, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t grid_size(int degree, int min_points) {
  const auto want = std::max<std::size_t>(static_cast<std::size_t>(min_points), 32u * static_cast<std::size_t>(degree));
  return std::bit_ceil(want);
}

}  // namespace

double alpha_lower_bound(double tau) {
  if (!(tau > 0.0)) return std::numeric_limits<double>::infinity();
  const double e = std::numbers::e;
  const double denom = (1.0 - 1.0 / tau) * e * e - 2.0 / tau;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt((1.0 + 1.0 / tau) * e / denom);
}

MuChoice choose_mu(double tau, double alpha) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(alpha <= 1.0)) throw std::invalid_argument("alpha must not exceed 1");
  const double bound = alpha_lower_bound(tau);
  if (!(alpha > bound)) {
    throw std::invalid_argument("alpha=" + std::to_string(alpha) + " is not above the admissible lower bound " +
                                std::to_string(bound) + " for tau=" + std::to_string(tau) +
                                " (asymptotic floor exp(-1/2) ~ 0.6065)");
  }
  if (alpha == 1.0) return {0.0, true};
  const double mu = -std::log(alpha) / tau;
  if (mu * tau > 1.0) throw std::logic_error("mu exceeds 1/tau");
  return {mu, false};
}

ApproxSpec make_spec(double tau, double lambda, double alpha) {
  const MuChoice m = choose_mu(tau, alpha);
  if (m.boundary) throw std::invalid_argument("alpha=1 leaves no room for the bump (mu=0)");
  ApproxSpec s{tau, lambda, m.mu, alpha, 0, std::numeric_limits<double>::quiet_NaN()};
  validate(s);
  return s;
}

void validate(const ApproxSpec& s) {
  if (!(s.tau > 0.0) || !std::isfinite(s.tau)) throw std::invalid_argument("tau must be positive");
  if (!(s.lambda > 0.0) || s.lambda > 1.0 + 1.0 / s.tau + 1e-12) {
    throw std::invalid_argument("lambda=" + std::to_string(s.lambda) + " outside (0, 1 + 1/tau]");
  }
  if (!(s.mu > 0.0) || s.mu * s.tau > 1.0 + 1e-12) throw std::invalid_argument("mu must lie in (0, 1/tau]");
  if (!(s.alpha > std::exp(-0.5)) || s.alpha > 1.0) throw std::invalid_argument("alpha must lie in (e^{-1/2}, 1]");
  if (std::abs(s.alpha - std::exp(-s.tau * s.mu)) > 1e-12) throw std::invalid_argument("alpha != exp(-tau mu)");
  if (s.lambda + s.mu >= kPi - 1.0 - s.mu) throw std::invalid_argument("bump support wraps around the circle");
  if (s.degree < 0) throw std::invalid_argument("negative degree");
}

double beta(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  // phi(z) / (phi(z) + phi(1 - z)) = 1 / (1 + exp(1/z - 1/(1 - z)))
  const double t = 1.0 / z - 1.0 / (1.0 - z);
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double bump_rho(double x, double lam, double mu) {
  if (x >= -1.0 && x <= lam) return 1.0;
  if (x > -1.0 - mu && x < -1.0) return beta((x + 1.0 + mu) / mu);
  if (x > lam && x < lam + mu) return beta((lam + mu - x) / mu);
  return 0.0;
}

double target_g(double x, const ApproxSpec& s) {
  const double r = bump_rho(x, s.lambda, s.mu);
  return r == 0.0 ? 0.0 : r * std::exp(s.tau * (x - s.lambda - s.mu));
}

double target_exponential(double x, const ApproxSpec& s) { return s.alpha * std::exp(s.tau * (x - s.lambda)); }

TrigPolynomial::TrigPolynomial(Vec coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 != 1) throw std::invalid_argument("coefficient vector must have odd length");
  degree_ = static_cast<int>(coeffs_.size() / 2);
}

cplx TrigPolynomial::coeff(int k) const {
  if (k < -degree_ || k > degree_) return {0.0, 0.0};
  return coeffs_(k + degree_);
}

cplx TrigPolynomial::evaluate(double x) const {
  RVec xs(1);
  xs(0) = x;
  return evaluate(xs)(0);
}

Vec TrigPolynomial::evaluate(const RVec& xs) const {
  // Horner in z = e^{ix} on z^L F(x), with split real/imaginary lanes so the
  // inner loop over points vectorizes.
  const Eigen::Index n = xs.size();
  Vec out(n);
  constexpr Eigen::Index kBlock = 512;
  std::vector<double> zr(kBlock), zi(kBlock), ar(kBlock), ai(kBlock);
  const Eigen::Index top = coeffs_.size() - 1;
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index m = std::min(kBlock, n - start);
    for (Eigen::Index p = 0; p < m; ++p) {
      zr[p] = std::cos(xs(start + p));
      zi[p] = std::sin(xs(start + p));
      ar[p] = coeffs_(top).real();
      ai[p] = coeffs_(top).imag();
    }
    for (Eigen::Index j = top - 1; j >= 0; --j) {
      const double cr = coeffs_(j).real();
      const double ci = coeffs_(j).imag();
      for (Eigen::Index p = 0; p < m; ++p) {
        const double r = ar[p] * zr[p] - ai[p] * zi[p] + cr;
        const double i = ar[p] * zi[p] + ai[p] * zr[p] + ci;
        ar[p] = r;
        ai[p] = i;
      }
    }
    for (Eigen::Index p = 0; p < m; ++p) {
      out(start + p) = cplx(ar[p], ai[p]) * std::polar(1.0, -static_cast<double>(degree_) * xs(start + p));
    }
  }
  return out;
}

double TrigPolynomial::sup_norm_circle(int min_points) const {
  const std::size_t m = grid_size(degree_, std::max(min_points, 4 * (2 * degree_ + 1)));
  // F(-pi + 2 pi j / m) = sum_k c_k (-1)^k e^{2 pi i k j / m}
  std::vector<cplx> buf(m, cplx{0.0, 0.0});
  for (int k = -degree_; k <= degree_; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k % static_cast<long>(m) + static_cast<long>(m)) % static_cast<long>(m));
    buf[idx] += (k % 2 == 0 ? 1.0 : -1.0) * coeffs_(k + degree_);
  }
  dft(buf, +1);
  double sup = 0.0;
  for (const auto& v : buf) sup = std::max(sup, std::abs(v));
  return sup;
}

TrigPolynomial fourier_fit(const std::function<double(double)>& g, int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be non-negative");
  const std::size_t m = grid_size(std::max(degree, 1), 64);
  std::vector<cplx> buf(m);
  for (std::size_t j = 0; j < m; ++j) {
    buf[j] = g(-kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m));
  }
  dft(buf, -1);
  Vec c(2 * degree + 1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (int k = -degree; k <= degree; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k % static_cast<long>(m) + static_cast<long>(m)) % static_cast<long>(m));
    c(k + degree) = (k % 2 == 0 ? 1.0 : -1.0) * buf[idx] * inv_m;
  }
  TrigPolynomial F(std::move(c));
  const double sup = F.sup_norm_circle();
  if (sup > 1.0) F = F.scaled(1.0 / (sup * (1.0 + 1e-9)));
  return F;
}

TrigPolynomial fourier_fit(const ApproxSpec& spec, int degree) {
  validate(spec);
  if (degree < 1) throw std::invalid_argument("degree must be at least 1");
  return fourier_fit([&spec](double x) { return target_g(x, spec); }, degree);
}

double sup_error(const std::function<cplx(double)>& f_exact, const TrigPolynomial& F, double a, double b,
                 int points) {
  if (!(a < b)) throw std::invalid_argument("sup_error needs a < b");
  if (points < 2) throw std::invalid_argument("sup_error needs at least two grid points");
  const RVec xs = RVec::LinSpaced(points, a, b);
  const Vec Fx = F.evaluate(xs);
  double err = 0.0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) err = std::max(err, std::abs(f_exact(xs(i)) - Fx(i)));
  return err;
}

double fit_error(const ApproxSpec& spec, const TrigPolynomial& F, int points) {
  return sup_error([&spec](double x) { return cplx(target_exponential(x, spec), 0.0); }, F, -1.0,
                   std::min(spec.lambda, kPi), points);
}

namespace {

Fit fit_at(const ApproxSpec& spec, int degree) {
  Fit f;
  f.poly = fourier_fit(spec, degree);
  f.spec = spec;
  f.spec.degree = degree;
  f.spec.eps = fit_error(spec, f.poly);
  return f;
}

}  // namespace

Fit fit_to_target(const ApproxSpec& spec, double eps_target) {
  validate(spec);
  if (!(eps_target >= kMinEpsTarget)) {
    throw std::invalid_argument("eps target below 1e-10 is beneath double-precision reach");
  }
  const int base = std::max(1, static_cast<int>(std::ceil(spec.tau)));
  const int cap = kMaxDegreeFactor * base;

  int fail = 0;
  Fit good;
  bool have_good = false;
  Fit best = fit_at(spec, base);
  for (int d = base;;) {
    Fit f = d == base ? best : fit_at(spec, d);
    if (f.spec.eps < best.spec.eps) best = f;
    if (f.spec.eps <= eps_target) {
      good = std::move(f);
      have_good = true;
      break;
    }
    fail = d;
    if (d >= cap) break;
    d = std::min(2 * d, cap);
  }
  if (!have_good) {
    best.reached = false;
    return best;
  }
  int lo = fail == 0 ? good.spec.degree - 1 : fail;  // last failing degree
  int hi = good.spec.degree;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    Fit f = fit_at(spec, mid);
    if (f.spec.eps <= eps_target) {
      hi = mid;
      good = std::move(f);
    } else {
      lo = mid;
    }
  }
  good.reached = true;
  return good;
}

Fit fit_with_hint(const ApproxSpec& spec, double eps_target, int degree_hint) {
  if (degree_hint <= 0) return fit_to_target(spec, eps_target);
  validate(spec);
  Fit f = fit_at(spec, degree_hint);
  if (f.spec.eps <= eps_target) {
    f.reached = true;
    return f;
  }
  // Probe upward with a growing increment, then bisect back to the first
  // degree above the hint that meets the target.
  const int cap = kMaxDegreeFactor * std::max(1, static_cast<int>(std::ceil(spec.tau)));
  int lo = degree_hint;
  for (int step = std::max(1, degree_hint / 128); lo < cap; step *= 2) {
    const int d = std::min(lo + step, cap);
    Fit g = fit_at(spec, d);
    if (g.spec.eps <= eps_target) {
      int hi = d;
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        Fit m = fit_at(spec, mid);
        if (m.spec.eps <= eps_target) {
          hi = mid;
          g = std::move(m);
        } else {
          lo = mid;
        }
      }
      g.reached = true;
      return g;
    }
    lo = d;
  }
  return fit_to_target(spec, eps_target);
}

nlohmann::json to_json(const TrigPolynomial& F) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < F.coeffs().size(); ++i) coeffs.push_back({F.coeffs()(i).real(), F.coeffs()(i).imag()});
  return {{"degree", F.degree()}, {"coeffs", coeffs}};
}

TrigPolynomial trig_polynomial_from_json(const nlohmann::json& j) {
  const int degree = j.at("degree").get<int>();
  const auto& arr = j.at("coeffs");
  if (static_cast<int>(arr.size()) != 2 * degree + 1) throw std::invalid_argument("coefficient count != 2*degree+1");
  Vec c(2 * degree + 1);
  for (int i = 0; i < 2 * degree + 1; ++i) c(i) = cplx(arr[i].at(0).get<double>(), arr[i].at(1).get<double>());
  return TrigPolynomial(std::move(c));
}

}  // namespace qite::approx
