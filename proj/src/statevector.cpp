// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include "qite/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace qite::sv {

namespace {

constexpr std::size_t kShotBatch = 1u << 16;
constexpr std::uint32_t kDumpMagic = 0x31565351u;  // "QSV1"

int qubits_for(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("state length must be a power of two >= 2");
  }
  const int m = std::countr_zero(static_cast<std::uint64_t>(dim));
  if (m > kMaxQubits) throw std::invalid_argument("state exceeds the qubit limit");
  return m;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> cumulative(const StateVector& s) {
  if (s.is_unnormalized()) throw std::invalid_argument("cannot sample an unnormalized state");
  const Vec& a = s.amplitudes();
  std::vector<double> cdf(static_cast<std::size_t>(a.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    acc += std::norm(a(i));
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

// Draws `shots` indices from the cumulative weights, calling sink(index) for
// each, in batch order.
template <typename Sink>
void draw(const std::vector<double>& cdf, std::size_t shots, std::uint64_t seed, Sink&& sink) {
  if (shots == 0) throw std::invalid_argument("shots must be positive");
  if (cdf.empty() || !(cdf.back() > 0.0)) throw std::invalid_argument("sampling weights must have positive mass");
  const double total = cdf.back();
  const std::size_t last = cdf.size() - 1;
  for (std::size_t start = 0, batch = 0; start < shots; start += kShotBatch, ++batch) {
    std::mt19937_64 rng(derive_seed(seed, batch));
    const std::size_t n = std::min(kShotBatch, shots - start);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = uniform01(rng) * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      sink(std::min(static_cast<std::size_t>(it - cdf.begin()), last));
    }
  }
}

void require_same_dim(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("state dimensions differ");
}

}  // namespace

StateVector::StateVector(Vec amplitudes, bool unnormalized)
    : amplitudes_(std::move(amplitudes)), unnormalized_(unnormalized) {
  qubits_ = qubits_for(amplitudes_.size());
  if (!amplitudes_.allFinite()) throw std::invalid_argument("non-finite amplitude");
  if (!unnormalized_ && std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(amplitudes_.norm()) + ")");
  }
}

StateVector StateVector::basis(int qubits, std::uint64_t index) {
  if (qubits < 1 || qubits > kMaxQubits) throw std::invalid_argument("invalid qubit count");
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  if (index >= static_cast<std::uint64_t>(dim)) throw std::invalid_argument("basis index out of range");
  Vec v = Vec::Zero(dim);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw std::domain_error("cannot normalize a zero vector");
  return StateVector(amplitudes_ / n);
}

DenseUnitary::DenseUnitary(Mat u, double tolerance) : u_(std::move(u)) {
  if (u_.rows() != u_.cols()) throw std::invalid_argument("unitary must be square");
  qubits_ = qubits_for(u_.rows());
  if (unitarity_defect(u_) > tolerance) throw std::invalid_argument("matrix is not unitary");
  u_adj_ = u_.adjoint();
}

double unitarity_defect(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

StateVector apply_dense(const Mat& u, const StateVector& s, double tolerance) {
  if (u.rows() != u.cols() || u.cols() != s.dimension()) throw std::invalid_argument("dimension mismatch");
  if (unitarity_defect(u) > tolerance) throw std::invalid_argument("matrix is not unitary");
  return StateVector(u * s.amplitudes(), s.is_unnormalized());
}

StateVector apply_pauli_rotation(const StateVector& s, const pauli::PauliString& p, double theta) {
  if (p.qubit_count() != s.qubit_count()) throw std::invalid_argument("Pauli string dimension mismatch");
  const Vec pv = pauli::apply_pauli(p, s.amplitudes());
  return StateVector(std::cos(theta / 2) * s.amplitudes() - kI * std::sin(theta / 2) * pv, s.is_unnormalized());
}

StateVector apply_single_qubit(const StateVector& s, int qubit, const Eigen::Matrix2cd& gate) {
  const int m = s.qubit_count();
  if (qubit < 0 || qubit >= m) throw std::invalid_argument("qubit index out of range");
  const Eigen::Index stride = Eigen::Index{1} << (m - 1 - qubit);
  Vec out = s.amplitudes();
  for (Eigen::Index base = 0; base < out.size(); base += 2 * stride) {
    for (Eigen::Index k = base; k < base + stride; ++k) {
      const cplx a0 = out(k);
      const cplx a1 = out(k + stride);
      out(k) = gate(0, 0) * a0 + gate(0, 1) * a1;
      out(k + stride) = gate(1, 0) * a0 + gate(1, 1) * a1;
    }
  }
  return StateVector(std::move(out), s.is_unnormalized());
}

StateVector apply_controlled(const UnitaryOperator& u, const StateVector& s, int control_value, bool dagger) {
  if (control_value != 0 && control_value != 1) throw std::invalid_argument("control value must be 0 or 1");
  if (s.qubit_count() != u.qubit_count() + 1) {
    throw std::invalid_argument("state must carry one ancilla on top of the unitary's register");
  }
  const Eigen::Index half = s.dimension() / 2;
  Vec out = s.amplitudes();
  const Eigen::Index offset = control_value == 0 ? 0 : half;
  const Vec branch = out.segment(offset, half);
  out.segment(offset, half) = dagger ? u.apply_adjoint(branch) : u.apply(branch);
  return StateVector(std::move(out), s.is_unnormalized());
}

MeasurementRecord decode(std::uint64_t bitstring, int qubits) {
  MeasurementRecord r;
  r.bitstring = bitstring;
  r.ancilla_bit = static_cast<int>((bitstring >> (qubits - 1)) & 1u);
  r.system_bits = bitstring & ((std::uint64_t{1} << (qubits - 1)) - 1);
  return r;
}

std::vector<MeasurementRecord> sample(const StateVector& s, std::size_t shots, std::uint64_t seed) {
  std::vector<MeasurementRecord> out;
  out.reserve(shots);
  const int m = s.qubit_count();
  draw(cumulative(s), shots, seed, [&](std::size_t idx) { out.push_back(decode(idx, m)); });
  return out;
}

std::vector<std::uint64_t> sample_counts(const StateVector& s, std::size_t shots, std::uint64_t seed) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(s.dimension()), 0);
  draw(cumulative(s), shots, seed, [&](std::size_t idx) { ++counts[idx]; });
  return counts;
}

std::vector<std::uint64_t> sample_categorical(const std::vector<double>& weights, std::size_t shots,
                                              std::uint64_t seed) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("sampling weights must be non-negative");
    acc += weights[i];
    cdf[i] = acc;
  }
  std::vector<std::uint64_t> counts(weights.size(), 0);
  draw(cdf, shots, seed, [&](std::size_t idx) { ++counts[idx]; });
  return counts;
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_dim(a, b);
  if (a.is_unnormalized() || b.is_unnormalized()) throw std::invalid_argument("fidelity needs normalized states");
  return std::min(1.0, std::abs(a.amplitudes().dot(b.amplitudes())));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void write_binary(const std::filesystem::path& path, const StateVector& s) {
  static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::uint32_t header[2] = {kDumpMagic, static_cast<std::uint32_t>(s.qubit_count())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (Eigen::Index i = 0; i < s.dimension(); ++i) {
    const double pair[2] = {s.amplitudes()(i).real(), s.amplitudes()(i).imag()};
    out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
  }
}

StateVector read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint32_t header[2] = {0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] != kDumpMagic) throw std::runtime_error("not a statevector dump: " + path.string());
  if (header[1] < 1 || header[1] > static_cast<std::uint32_t>(kMaxQubits)) {
    throw std::runtime_error("invalid qubit count in dump");
  }
  const Eigen::Index dim = Eigen::Index{1} << header[1];
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double pair[2];
    in.read(reinterpret_cast<char*>(pair), sizeof(pair));
    if (!in) throw std::runtime_error("truncated statevector dump");
    v(i) = cplx(pair[0], pair[1]);
  }
  const bool unnormalized = std::abs(v.norm() - 1.0) > kNormTolerance;
  return StateVector(std::move(v), unnormalized);
}

}  // namespace qite::sv
