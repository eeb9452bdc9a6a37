// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qite/types.hpp"

namespace qite::sv {
class StateVector;
}

namespace qite::pauli {

// Largest register for which Pauli strings are supported (index fits in 64 bits).
inline constexpr int kMaxQubits = 62;
inline constexpr int kDefaultDenseLimit = 12;

/// Tensor product of single-qubit Paulis. Character j of the label acts on
/// qubit j, and qubit 0 is the most significant bit of a basis index.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::string_view label);

  static PauliString identity(int n);

  int qubit_count() const { return static_cast<int>(label_.size()); }
  const std::string& label() const { return label_; }
  char op(int qubit) const { return label_[static_cast<std::size_t>(qubit)]; }
  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  /// Basis-index mask of the qubits carrying a non-identity operator.
  std::uint64_t support_mask() const { return x_mask_ | z_mask_; }
  bool is_identity() const { return support_mask() == 0; }

  /// P|b> = phase(b) |b XOR x_mask>.
  cplx phase(std::uint64_t b) const;

  bool commutes_with(const PauliString& other) const;
  Mat dense() const;

  bool operator==(const PauliString& other) const { return label_ == other.label_; }

 private:
  std::string label_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  cplx y_phase_{1.0, 0.0};  // i^{number of Y factors}
};

/// P|v> without materializing P.
Vec apply_pauli(const PauliString& p, const Vec& v);

struct PauliTerm {
  double coeff = 0.0;
  PauliString string;
};

/// H = sum_j h_j sigma_j together with the bookkeeping of normalize().
class PauliSum {
 public:
  PauliSum() = default;
  PauliSum(int qubit_count, std::vector<PauliTerm> terms, bool normalized = false,
           double shift = 0.0);

  int qubit_count() const { return qubit_count_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  int term_count() const { return static_cast<int>(terms_.size()); }
  double max_abs_coeff() const { return max_abs_; }
  double coeff_l1() const { return l1_; }
  bool normalized() const { return normalized_; }
  /// Identity shift s applied by normalize(): H_norm = H_raw / rho - s I.
  double shift() const { return shift_; }

  Mat dense() const;
  Vec apply(const Vec& v) const;
  double expectation(const Vec& v) const;

  PauliSum scaled(double factor) const;

 private:
  int qubit_count_ = 0;
  std::vector<PauliTerm> terms_;
  double max_abs_ = 0.0;
  double l1_ = 0.0;
  bool normalized_ = false;
  double shift_ = 0.0;
};

struct SpectrumInfo {
  RVec eigenvalues;  // ascending
  Mat eigenvectors;  // columns, same order
  double gap = 0.0;
  double ground_energy = 0.0;
  bool degenerate = false;  // gap below kDegeneracyTolerance

  static constexpr double kDegeneracyTolerance = 1e-10;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  Vec ground_state() const { return eigenvectors.col(0); }
  /// Coefficients c_j = <psi_j|phi>.
  Vec coefficients(const Vec& phi) const { return eigenvectors.adjoint() * phi; }
  /// e^{-i t H} assembled from the eigendecomposition.
  Mat evolution(double t) const;
};

/// Open-chain Heisenberg model with a transverse X field, before normalization.
PauliSum build_heisenberg(int n = 4);

/// Rescale by the exact spectral radius and, if needed, shift so that the
/// ground energy is negative.
PauliSum normalize(const PauliSum& h, int dense_limit = kDefaultDenseLimit);

SpectrumInfo diagonalize(const PauliSum& h, int dense_limit = kDefaultDenseLimit);

double overlap_gamma(const SpectrumInfo& spec, const sv::StateVector& phi);

nlohmann::json to_json(const PauliSum& h);
PauliSum pauli_sum_from_json(const nlohmann::json& j);
PauliSum load_hamiltonian(const std::filesystem::path& path);
void save_hamiltonian(const std::filesystem::path& path, const PauliSum& h);

}  // namespace qite::pauli
