// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/pauli.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qite/statevector.hpp"

namespace qite::pauli {

namespace {

std::uint64_t bit_of(int qubit, int n) { return std::uint64_t{1} << (n - 1 - qubit); }

void check_dense_limit(int n, int dense_limit) {
  if (n > dense_limit) {
    throw std::length_error("dense materialization limited to " + std::to_string(dense_limit) +
                            " qubits, got " + std::to_string(n));
  }
}

}  // namespace

PauliString::PauliString(std::string_view label) : label_(label) {
  const int n = static_cast<int>(label.size());
  if (n == 0) throw std::invalid_argument("Pauli string must act on at least one qubit");
  if (n > kMaxQubits) throw std::invalid_argument("Pauli string too long");
  int y_count = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = bit_of(q, n);
    switch (label[static_cast<std::size_t>(q)]) {
      case 'I':
        break;
      case 'X':
        x_mask_ |= bit;
        break;
      case 'Z':
        z_mask_ |= bit;
        break;
      case 'Y':
        x_mask_ |= bit;
        z_mask_ |= bit;
        ++y_count;
        break;
      default:
        throw std::invalid_argument("invalid Pauli label '" + std::string(label) + "'");
    }
  }
  static const cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  y_phase_ = powers[y_count % 4];
}

PauliString PauliString::identity(int n) {
  if (n < 1) throw std::invalid_argument("identity needs at least one qubit");
  return PauliString(std::string(static_cast<std::size_t>(n), 'I'));
}

cplx PauliString::phase(std::uint64_t b) const {
  return (std::popcount(b & z_mask_) & 1) ? -y_phase_ : y_phase_;
}

bool PauliString::commutes_with(const PauliString& other) const {
  const int anti = std::popcount(x_mask_ & other.z_mask_) + std::popcount(z_mask_ & other.x_mask_);
  return (anti % 2) == 0;
}

Mat PauliString::dense() const {
  const int n = qubit_count();
  check_dense_limit(n, kDefaultDenseLimit + 8);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat m = Mat::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    m(static_cast<Eigen::Index>(ub ^ x_mask_), b) = phase(ub);
  }
  return m;
}

Vec apply_pauli(const PauliString& p, const Vec& v) {
  const Eigen::Index dim = v.size();
  if (dim != (Eigen::Index{1} << p.qubit_count())) {
    throw std::invalid_argument("Pauli string and vector dimensions differ");
  }
  Vec out(dim);
  const std::uint64_t x = p.x_mask();
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    out(static_cast<Eigen::Index>(ub ^ x)) = p.phase(ub) * v(b);
  }
  return out;
}

PauliSum::PauliSum(int qubit_count, std::vector<PauliTerm> terms, bool normalized, double shift)
    : qubit_count_(qubit_count), terms_(std::move(terms)), normalized_(normalized), shift_(shift) {
  if (qubit_count_ < 1 || qubit_count_ > kMaxQubits) {
    throw std::invalid_argument("invalid qubit count " + std::to_string(qubit_count_));
  }
  if (terms_.empty()) throw std::invalid_argument("a Pauli sum needs at least one term");
  for (const auto& t : terms_) {
    if (t.string.qubit_count() != qubit_count_) {
      throw std::invalid_argument("term '" + t.string.label() + "' has the wrong qubit count");
    }
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite coefficient");
    max_abs_ = std::max(max_abs_, std::abs(t.coeff));
    l1_ += std::abs(t.coeff);
  }
}

Mat PauliSum::dense() const {
  check_dense_limit(qubit_count_, kDefaultDenseLimit + 8);
  const Eigen::Index dim = Eigen::Index{1} << qubit_count_;
  Mat m = Mat::Zero(dim, dim);
  for (const auto& t : terms_) {
    const std::uint64_t x = t.string.x_mask();
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      m(static_cast<Eigen::Index>(ub ^ x), b) += t.coeff * t.string.phase(ub);
    }
  }
  return m;
}

Vec PauliSum::apply(const Vec& v) const {
  const Eigen::Index dim = Eigen::Index{1} << qubit_count_;
  if (v.size() != dim) throw std::invalid_argument("vector dimension does not match Hamiltonian");
  Vec out = Vec::Zero(dim);
  for (const auto& t : terms_) {
    const std::uint64_t x = t.string.x_mask();
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      out(static_cast<Eigen::Index>(ub ^ x)) += t.coeff * t.string.phase(ub) * v(b);
    }
  }
  return out;
}

double PauliSum::expectation(const Vec& v) const { return v.dot(apply(v)).real(); }

PauliSum PauliSum::scaled(double factor) const {
  std::vector<PauliTerm> t = terms_;
  for (auto& term : t) term.coeff *= factor;
  return PauliSum(qubit_count_, std::move(t), normalized_, shift_ * factor);
}

Mat SpectrumInfo::evolution(double t) const {
  Vec phases(eigenvalues.size());
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    phases(j) = std::exp(-kI * t * eigenvalues(j));
  }
  return eigenvectors * phases.asDiagonal() * eigenvectors.adjoint();
}

PauliSum build_heisenberg(int n) {
  if (n < 2) throw std::invalid_argument("Heisenberg chain needs at least two qubits");
  std::vector<PauliTerm> terms;
  const std::string id(static_cast<std::size_t>(n), 'I');
  for (int j = 0; j + 1 < n; ++j) {
    for (char p : {'X', 'Y', 'Z'}) {
      std::string label = id;
      label[static_cast<std::size_t>(j)] = p;
      label[static_cast<std::size_t>(j + 1)] = p;
      terms.push_back({-1.0, PauliString(label)});
    }
  }
  for (int j = 0; j < n; ++j) {
    std::string label = id;
    label[static_cast<std::size_t>(j)] = 'X';
    terms.push_back({-0.5, PauliString(label)});
  }
  return PauliSum(n, std::move(terms));
}

SpectrumInfo diagonalize(const PauliSum& h, int dense_limit) {
  check_dense_limit(h.qubit_count(), dense_limit);
  Eigen::SelfAdjointEigenSolver<Mat> solver(h.dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  SpectrumInfo s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.ground_energy = s.eigenvalues(0);
  s.gap = s.eigenvalues.size() > 1 ? s.eigenvalues(1) - s.eigenvalues(0) : 0.0;
  s.degenerate = s.gap < SpectrumInfo::kDegeneracyTolerance;
  return s;
}

PauliSum normalize(const PauliSum& h, int dense_limit) {
  const SpectrumInfo spec = diagonalize(h, dense_limit);
  const double rho = spec.eigenvalues.cwiseAbs().maxCoeff();
  if (rho <= 0.0 || !std::isfinite(rho)) throw std::invalid_argument("cannot normalize a zero Hamiltonian");

  std::vector<PauliTerm> terms = h.terms();
  for (auto& t : terms) t.coeff /= rho;
  double shift = h.shift() / rho;

  const double lambda0 = spec.ground_energy / rho;
  if (lambda0 >= 0.0) {
    // Moves the ground energy to -1; the whole spectrum then sits in [-1, 0].
    const double s = lambda0 + 1.0;
    shift += s;
    const PauliString id = PauliString::identity(h.qubit_count());
    bool merged = false;
    for (auto& t : terms) {
      if (t.string.is_identity()) {
        t.coeff -= s;
        merged = true;
        break;
      }
    }
    if (!merged) terms.push_back({-s, id});
  }
  return PauliSum(h.qubit_count(), std::move(terms), true, shift);
}

double overlap_gamma(const SpectrumInfo& spec, const sv::StateVector& phi) {
  if (phi.amplitudes().size() != spec.dimension()) {
    throw std::invalid_argument("state dimension does not match spectrum");
  }
  return std::min(1.0, std::abs(spec.eigenvectors.col(0).dot(phi.amplitudes())));
}

nlohmann::json to_json(const PauliSum& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : h.terms()) terms.push_back({{"coeff", t.coeff}, {"pauli", t.string.label()}});
  return {{"n", h.qubit_count()}, {"terms", terms}, {"normalized", h.normalized()}, {"shift", h.shift()}};
}

PauliSum pauli_sum_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "terms" && key != "normalized" && key != "shift") {
      throw std::invalid_argument("unknown Hamiltonian field '" + key + "'");
    }
  }
  const int n = j.at("n").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({t.at("coeff").get<double>(), PauliString(t.at("pauli").get<std::string>())});
  }
  return PauliSum(n, std::move(terms), j.value("normalized", false), j.value("shift", 0.0));
}

PauliSum load_hamiltonian(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open Hamiltonian file " + path.string());
  return pauli_sum_from_json(nlohmann::json::parse(in));
}

void save_hamiltonian(const std::filesystem::path& path, const PauliSum& h) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(h).dump(2) << '\n';
}

}  // namespace qite::pauli
