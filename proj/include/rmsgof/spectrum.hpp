#pragma once

#include <vector>

#include "rmsgof/matrix.hpp"
#include "rmsgof/model.hpp"

namespace rmsgof {

// n x 2 constraint matrix: column 1 all ones, column 2 the log-probability
// derivative at theta-hat. Its column space spans the normals of the two
// hyperplanes the limiting Gaussian is restricted to.
struct ConstraintMatrix {
  Matrix h;  // n x 2
};

// Variances of the restricted Gaussian along its principal axes (ascending),
// i.e. reciprocals of the positive eigenvalues of B.
struct VarianceSpectrum {
  std::vector<double> variances;    // n - 2 positive reals, ascending
  std::vector<double> eigenvalues;  // all n eigenvalues of B, descending
  int zero_count = 0;               // expected 2
  double condition_diag = 1.0;      // largest / smallest positive eigenvalue
};

ConstraintMatrix build_constraints(const Model& model, double theta_hat);

// Orthonormal basis of the column space of H via Householder QR with column
// pivoting. Throws RankDeficientConstraints when H is numerically rank 1.
Matrix orthonormal_basis(const ConstraintMatrix& h);

// B = (I - QQ^T) diag(1/p_k(theta_hat)) (I - QQ^T).
Matrix build_b(const Model& model, double theta_hat, const Matrix& q);

// Eigenvalues by cyclic Jacobi rotations; the two eigenvalues smallest in
// magnitude must be numerical zeros, the rest are reciprocated into the
// variances.
VarianceSpectrum variance_spectrum(const Matrix& b);

// Full pipeline: constraints -> QR -> B -> eigenvalues.
VarianceSpectrum model_spectrum(const Model& model, double theta_hat);

// All eigenvalues of a symmetric matrix by the same Jacobi iteration,
// unsorted classification aside (descending order).
std::vector<double> jacobi_eigenvalues(const Matrix& b);

}  // namespace rmsgof
