// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "qite/pauli.hpp"
#include "qite/statevector.hpp"

using namespace qite;
using pauli::PauliString;
using pauli::PauliSum;
using pauli::PauliTerm;

namespace {

PauliSum from_oracle_terms(const std::vector<oracle::Term>& terms) {
  std::vector<PauliTerm> out;
  for (const auto& t : terms) out.push_back({t.coeff, PauliString(t.label)});
  return PauliSum(static_cast<int>(terms.front().label.size()), out);
}

double spectral_radius(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

const double kRho4 = 3.0 + 2.0 * std::sqrt(3.0);

}  // namespace

TEST(PauliString, DenseMatchesKroneckerOracle) {
  std::mt19937_64 rng(11);
  const char letters[] = {'I', 'X', 'Y', 'Z'};
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::string label;
    for (int q = 0; q < n; ++q) label.push_back(letters[rng() % 4]);
    const Mat ours = PauliString(label).dense();
    EXPECT_LT((ours - oracle::pauli_dense(label)).norm(), 1e-14) << label;
  }
}

TEST(PauliString, HermitianUnitaryInvolutory) {
  for (const char* label : {"X", "Y", "Z", "XY", "YZX", "IYIZ"}) {
    const Mat m = PauliString(label).dense();
    const Mat id = Mat::Identity(m.rows(), m.cols());
    EXPECT_LT((m - m.adjoint()).norm(), 1e-14);
    EXPECT_LT((m * m - id).norm(), 1e-14);
    EXPECT_LT((m.adjoint() * m - id).norm(), 1e-14);
  }
}

TEST(PauliString, ApplyAndPhaseMatchDense) {
  std::mt19937_64 rng(5);
  for (const char* label : {"XYZ", "YYI", "ZIX", "III"}) {
    const PauliString p(label);
    const Vec v = oracle::random_state(8, rng);
    EXPECT_LT((apply_pauli(p, v) - oracle::pauli_dense(label) * v).norm(), 1e-14);
    const Mat d = oracle::pauli_dense(label);
    for (std::uint64_t b = 0; b < 8; ++b) {
      EXPECT_NEAR(std::abs(d(static_cast<Eigen::Index>(b ^ p.x_mask()), static_cast<Eigen::Index>(b)) - p.phase(b)),
                  0.0, 1e-14);
    }
  }
}

TEST(PauliString, CommutationAgreesWithMatrices) {
  const std::vector<std::string> labels = {"XX", "YY", "ZZ", "XZ", "ZX", "YI", "IX", "XY"};
  for (const auto& a : labels) {
    for (const auto& b : labels) {
      const Mat ma = oracle::pauli_dense(a);
      const Mat mb = oracle::pauli_dense(b);
      const bool commute = (ma * mb - mb * ma).norm() < 1e-12;
      EXPECT_EQ(PauliString(a).commutes_with(PauliString(b)), commute) << a << " " << b;
    }
  }
}

TEST(PauliString, RejectsBadLabels) {
  EXPECT_THROW(PauliString("XQ"), std::invalid_argument);
  EXPECT_THROW(PauliString(""), std::invalid_argument);
}

TEST(PauliSum, HeisenbergStructure) {
  const PauliSum h4 = pauli::build_heisenberg(4);
  EXPECT_EQ(h4.term_count(), 13);
  EXPECT_DOUBLE_EQ(h4.max_abs_coeff(), 1.0);
  int field = 0;
  for (const auto& t : h4.terms()) {
    if (std::abs(t.coeff + 0.5) < 1e-15) ++field;
  }
  EXPECT_EQ(field, 4);
  EXPECT_EQ(pauli::build_heisenberg(2).term_count(), 5);
  EXPECT_THROW(pauli::build_heisenberg(1), std::invalid_argument);
}

TEST(PauliSum, DenseMatchesOracle) {
  const Mat ours = pauli::build_heisenberg(4).dense();
  EXPECT_LT((ours - oracle::hamiltonian_dense(oracle::heisenberg_terms(4))).norm(), 1e-13);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto terms = oracle::random_terms(3, 6, rng);
    const PauliSum h = from_oracle_terms(terms);
    const Mat ref = oracle::hamiltonian_dense(terms);
    EXPECT_LT((h.dense() - ref).norm(), 1e-13);
    const Vec v = oracle::random_state(8, rng);
    EXPECT_LT((h.apply(v) - ref * v).norm(), 1e-13);
    EXPECT_NEAR(h.expectation(v), (v.adjoint() * ref * v)(0).real(), 1e-13);
  }
}

TEST(Normalize, SpectralRadiusBecomesOne) {
  const PauliSum raw = pauli::build_heisenberg(4);
  const double rho = spectral_radius(oracle::hamiltonian_dense(oracle::heisenberg_terms(4)));
  EXPECT_NEAR(rho, kRho4, 1e-12);
  const PauliSum h = pauli::normalize(raw);
  EXPECT_TRUE(h.normalized());
  EXPECT_NEAR(spectral_radius(h.dense()), 1.0, 1e-12);
  EXPECT_LT((h.dense() - raw.dense() / rho).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(h.shift(), 0.0);
}

TEST(Normalize, ScaleInvariantAndIdempotent) {
  const PauliSum a = pauli::normalize(pauli::build_heisenberg(4));
  const PauliSum b = pauli::normalize(pauli::build_heisenberg(4).scaled(7.25));
  EXPECT_LT((a.dense() - b.dense()).norm(), 1e-12);
  const PauliSum again = pauli::normalize(a);
  EXPECT_LT((again.dense() - a.dense()).norm(), 1e-12);
}

TEST(Normalize, SingleZNeedsNoShift) {
  const PauliSum h(1, {{-1.0, PauliString("Z")}});
  const auto spec = pauli::diagonalize(pauli::normalize(h));
  EXPECT_NEAR(spec.ground_energy, -1.0, 1e-15);
  EXPECT_NEAR(spec.gap, 2.0, 1e-15);
}

TEST(Normalize, PositiveSpectrumIsShifted) {
  // 2I + Z has spectrum {1, 3}; after rescaling the ground energy must be negative.
  const PauliSum h(1, {{2.0, PauliString("I")}, {1.0, PauliString("Z")}});
  const PauliSum n = pauli::normalize(h);
  const auto spec = pauli::diagonalize(n);
  EXPECT_LT(spec.ground_energy, 0.0);
  EXPECT_LE(spec.eigenvalues.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  EXPECT_GT(n.shift(), 0.0);
}

TEST(Diagonalize, ReconstructsAndOrders) {
  const PauliSum h = pauli::normalize(pauli::build_heisenberg(4));
  const auto spec = pauli::diagonalize(h);
  const Mat rebuilt = spec.eigenvectors * spec.eigenvalues.cast<cplx>().asDiagonal() * spec.eigenvectors.adjoint();
  EXPECT_LT((rebuilt - h.dense()).cwiseAbs().maxCoeff(), 1e-10);
  for (int j = 1; j < spec.dimension(); ++j) EXPECT_LE(spec.eigenvalues(j - 1), spec.eigenvalues(j));
  EXPECT_FALSE(spec.degenerate);
}

TEST(Diagonalize, GoldenHeisenbergSpectrum) {
  // Closed forms for the rescaled four-site chain: lambda_0 = -5 / rho and gap = 1 / rho.
  const auto spec = pauli::diagonalize(pauli::normalize(pauli::build_heisenberg(4)));
  EXPECT_NEAR(spec.ground_energy, -5.0 / kRho4, 1e-12);
  EXPECT_NEAR(spec.gap, 1.0 / kRho4, 1e-12);
  const Mat evo = spec.evolution(0.3);
  const Mat ref = oracle::expm_hermitian_times(pauli::normalize(pauli::build_heisenberg(4)).dense(), cplx(0, -0.3));
  EXPECT_LT((evo - ref).norm(), 1e-12);
}

TEST(Diagonalize, DegenerateGroundFlagged) {
  const PauliSum h(1, {{1.0, PauliString("I")}});
  EXPECT_TRUE(pauli::diagonalize(h).degenerate);
}

TEST(Overlap, Gamma) {
  const auto spec = pauli::diagonalize(pauli::normalize(pauli::build_heisenberg(4)));
  EXPECT_NEAR(pauli::overlap_gamma(spec, sv::StateVector(spec.ground_state())), 1.0, 1e-12);
  EXPECT_NEAR(pauli::overlap_gamma(spec, sv::StateVector(spec.eigenvectors.col(3))), 0.0, 1e-12);
  EXPECT_NEAR(pauli::overlap_gamma(spec, sv::StateVector::basis(4, 0)), 0.25, 1e-12);
}

TEST(PauliSumJson, RoundTripAndErrors) {
  const PauliSum h = pauli::normalize(pauli::build_heisenberg(3));
  const PauliSum back = pauli::pauli_sum_from_json(pauli::to_json(h));
  EXPECT_EQ(back.term_count(), h.term_count());
  EXPECT_EQ(back.normalized(), h.normalized());
  EXPECT_LT((back.dense() - h.dense()).norm(), 1e-15);

  const auto path = std::filesystem::temp_directory_path() / "qite_test_hamiltonian.json";
  pauli::save_hamiltonian(path, h);
  EXPECT_LT((pauli::load_hamiltonian(path).dense() - h.dense()).norm(), 1e-15);
  std::filesystem::remove(path);

  nlohmann::json bad = pauli::to_json(h);
  bad["colour"] = 1;
  EXPECT_THROW(pauli::pauli_sum_from_json(bad), std::invalid_argument);
  nlohmann::json wrong_len = pauli::to_json(h);
  wrong_len["terms"][0]["pauli"] = "XX";
  EXPECT_THROW(pauli::pauli_sum_from_json(wrong_len), std::invalid_argument);
}
