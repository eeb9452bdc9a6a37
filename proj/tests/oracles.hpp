// Copyright 2026 The qite Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations used only by the tests. They are built from
// explicit Kronecker products, matrix powers and matrix exponentials so that
// they share no code path with the library under test.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat pauli_1q(char c);
Mat kron(const Mat& a, const Mat& b);
/// Kronecker product of single-qubit matrices; label[0] is the leftmost factor.
Mat pauli_dense(const std::string& label);

struct Term {
  double coeff;
  std::string label;
};
Mat hamiltonian_dense(const std::vector<Term>& terms);

/// Heisenberg chain written out by hand: -sum_bonds (XX + YY + ZZ) - 0.5 sum_sites X.
std::vector<Term> heisenberg_terms(int n);

Mat expm(const Mat& a);  // Eigen MatrixFunctions
Mat expm_hermitian_times(const Mat& h, cplx factor);  // exp(factor * h)

/// sum_k c_k U^k with U^k built by repeated multiplication (negative powers via U^dag).
Mat matrix_polynomial(const Vec& coeffs, const Mat& u);

/// beta, rho and g written directly from their definitions.
double beta(double z);
double bump(double x, double lam, double mu);
double g(double x, double tau, double lam, double alpha);

/// Fourier coefficients by direct O(M L) quadrature.
Vec fourier_coeffs(double tau, double lam, double alpha, int degree, int nodes);

/// Full matrix of the single-ancilla comb for a dense U on the system.
Mat comb_matrix(const std::vector<double>& ty, const std::vector<double>& tz, const Mat& u);

/// Per-site basis change mapping each X / Y of the label to Z (H and H S^dag).
Mat basis_change(const std::string& label);

/// Exact expectation of the sampled estimator over every (term, outcome) pair.
double estimator_expectation(const std::vector<Term>& terms, const Vec& joint);

double agresti_coull_low(double x, double n, double z);
double agresti_coull_high(double x, double n, double z);

/// Random Hermitian Pauli sum on n qubits with m terms (non-identity labels).
std::vector<Term> random_terms(int n, int m, std::mt19937_64& rng);
Vec random_state(int dim, std::mt19937_64& rng);

}  // namespace oracle
