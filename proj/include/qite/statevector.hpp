// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "qite/pauli.hpp"
#include "qite/types.hpp"

namespace qite::sv {

inline constexpr int kMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;

/// Amplitudes over m qubits; qubit 0 is the most significant index bit, and
/// when an ancilla is present it is qubit 0.
class StateVector {
 public:
  StateVector() = default;
  /// Validates the length and, unless `unnormalized` is set, the unit norm.
  explicit StateVector(Vec amplitudes, bool unnormalized = false);

  static StateVector basis(int qubits, std::uint64_t index);
  static StateVector unnormalized_from(Vec amplitudes) { return StateVector(std::move(amplitudes), true); }

  int qubit_count() const { return qubits_; }
  Eigen::Index dimension() const { return amplitudes_.size(); }
  const Vec& amplitudes() const { return amplitudes_; }
  bool is_unnormalized() const { return unnormalized_; }
  double norm() const { return amplitudes_.norm(); }
  /// Unit-norm copy; throws if the norm vanishes.
  StateVector normalized() const;

 private:
  Vec amplitudes_;
  int qubits_ = 0;
  bool unnormalized_ = false;
};

struct MeasurementRecord {
  std::uint64_t bitstring = 0;
  int ancilla_bit = 0;          // leading qubit
  std::uint64_t system_bits = 0;  // remaining qubits
};

/// A unitary acting on a system register, given only through its action.
class UnitaryOperator {
 public:
  virtual ~UnitaryOperator() = default;
  virtual int qubit_count() const = 0;
  virtual Vec apply(const Vec& v) const = 0;
  virtual Vec apply_adjoint(const Vec& v) const = 0;
};

class DenseUnitary final : public UnitaryOperator {
 public:
  explicit DenseUnitary(Mat u, double tolerance = 1e-10);
  int qubit_count() const override { return qubits_; }
  Vec apply(const Vec& v) const override { return u_ * v; }
  Vec apply_adjoint(const Vec& v) const override { return u_adj_ * v; }
  const Mat& matrix() const { return u_; }

 private:
  Mat u_;
  Mat u_adj_;
  int qubits_ = 0;
};

/// Maximum deviation of U^dagger U from the identity.
double unitarity_defect(const Mat& u);

StateVector apply_dense(const Mat& u, const StateVector& s, double tolerance = 1e-10);
StateVector apply_pauli_rotation(const StateVector& s, const pauli::PauliString& p, double theta);
StateVector apply_single_qubit(const StateVector& s, int qubit, const Eigen::Matrix2cd& gate);
/// Applies U (or U^dagger) to the system register on the branch where the
/// ancilla (qubit 0) equals control_value.
StateVector apply_controlled(const UnitaryOperator& u, const StateVector& s, int control_value, bool dagger);

/// Computational-basis samples. Shots are drawn in fixed-size batches, each
/// with its own derived seed, so the result depends only on (state, shots, seed).
std::vector<MeasurementRecord> sample(const StateVector& s, std::size_t shots, std::uint64_t seed);
/// Histogram over basis indices with the same stream as sample().
std::vector<std::uint64_t> sample_counts(const StateVector& s, std::size_t shots, std::uint64_t seed);

/// Counts of `shots` i.i.d. draws from the (unnormalized, non-negative) weights.
std::vector<std::uint64_t> sample_categorical(const std::vector<double>& weights, std::size_t shots,
                                              std::uint64_t seed);

MeasurementRecord decode(std::uint64_t bitstring, int qubits);

double fidelity(const StateVector& a, const StateVector& b);

/// Seed for stream `stream` derived from `seed` (SplitMix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

void write_binary(const std::filesystem::path& path, const StateVector& s);
StateVector read_binary(const std::filesystem::path& path);

}  // namespace qite::sv
