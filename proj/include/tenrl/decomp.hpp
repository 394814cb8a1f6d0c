#pragma once

#include <cstdint>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::decomp {

/// Weighted sum of rank-1 tensors. factors[k] has shape (I_k, R) with unit
/// columns; the column norms live in `weights`.
struct CPDecomposition {
  std::vector<double> weights;
  std::vector<Matrix> factors;

  std::size_t rank() const { return weights.size(); }
  Shape shape() const;
};

/// Core tensor with one factor per mode; factors[k] has shape (I_k, R_k).
struct TuckerDecomposition {
  DenseTensor core;
  std::vector<Matrix> factors;

  Shape shape() const;
  Shape ranks() const { return core.shape(); }
};

struct CPOptions {
  int max_iters = 200;
  double tol = 1e-8;
  int restarts = 3;
  std::uint64_t seed = 0;
};

struct CPResult {
  CPDecomposition decomposition;
  double rel_error = 0.0;
  /// Relative error after each sweep of the winning restart.
  std::vector<double> error_history;
};

struct TuckerOptions {
  int max_iters = 200;
  double tol = 1e-8;
};

struct TuckerResult {
  TuckerDecomposition decomposition;
  double rel_error = 0.0;
  double hosvd_rel_error = 0.0;
  std::vector<double> error_history;
};

DenseTensor cp_reconstruct(const CPDecomposition& d);
CPResult cp_als(const DenseTensor& x, std::size_t rank, const CPOptions& opts = {});

DenseTensor tucker_reconstruct(const TuckerDecomposition& d);
/// Applies the factors in the given mode order; any permutation gives the same tensor.
DenseTensor tucker_reconstruct(const TuckerDecomposition& d, std::span<const std::size_t> mode_order);
TuckerResult tucker_hooi(const DenseTensor& x, const Shape& ranks, const TuckerOptions& opts = {});

/// Truncated higher-order SVD: leading eigenvectors of each unfolding's Gram matrix.
TuckerDecomposition tucker_hosvd(const DenseTensor& x, const Shape& ranks);

/// R·(1 + ΣI_k) for CP.
std::size_t param_count(const CPDecomposition& d);
/// ΠR_k + ΣI_k·R_k for Tucker.
std::size_t param_count(const TuckerDecomposition& d);
std::size_t tucker_param_count(const Shape& shape, const Shape& ranks);
std::size_t cp_param_count(const Shape& shape, std::size_t rank);

double relative_error(const DenseTensor& x, const DenseTensor& approx);

}  // namespace tenrl::decomp
