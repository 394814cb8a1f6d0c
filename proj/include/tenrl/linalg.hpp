#pragma once

#include <random>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::linalg {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Deterministic:
/// the sweep order is fixed and each eigenvector is sign-normalized so that
/// its largest-magnitude entry is positive.
SymmetricEigen eigh(const Matrix& a, double tol = 1e-14, int max_sweeps = 100);

/// Leading `k` eigenvectors (as columns) of a symmetric matrix.
Matrix leading_eigenvectors(const Matrix& a, std::size_t k);

/// Thin QR; returns the Q factor (rows × min(rows, cols)) with orthonormal columns.
Matrix orthonormalize(const Matrix& a);

/// Pseudo-inverse of a symmetric positive semidefinite matrix; eigenvalues
/// below rel_tol·λ_max are treated as zero.
Matrix pinv_psd(const Matrix& a, double rel_tol = 1e-12);

/// Copies the average of a and aᵀ back into a.
void symmetrize(Matrix& a);

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace tenrl::linalg
