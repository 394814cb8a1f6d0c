#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tenrl/decomp.hpp"
#include "tenrl/linalg.hpp"

namespace tenrl::decomp {

Shape TuckerDecomposition::shape() const {
  Shape s;
  for (const auto& f : factors) s.push_back(f.rows());
  return s;
}

DenseTensor tucker_reconstruct(const TuckerDecomposition& d, std::span<const std::size_t> mode_order) {
  if (d.factors.size() != d.core.order()) throw std::invalid_argument("tucker_reconstruct: one factor per core mode");
  DenseTensor x = d.core;
  for (auto mode : mode_order) x = mode_n_product(x, d.factors.at(mode), mode);
  return x;
}

DenseTensor tucker_reconstruct(const TuckerDecomposition& d) {
  std::vector<std::size_t> order(d.factors.size());
  std::iota(order.begin(), order.end(), 0);
  return tucker_reconstruct(d, order);
}

namespace {

void validate_ranks(const DenseTensor& x, const Shape& ranks) {
  if (ranks.size() != x.order()) throw std::invalid_argument("tucker: need one rank per mode");
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    if (ranks[k] < 1 || ranks[k] > x.extent(k)) {
      throw std::invalid_argument("tucker: rank " + std::to_string(ranks[k]) + " invalid for mode " +
                                  std::to_string(k) + " of extent " + std::to_string(x.extent(k)));
    }
  }
}

Matrix leading_left_singular(const DenseTensor& y, std::size_t mode, std::size_t rank) {
  const Matrix unf = unfold(y, mode);
  return linalg::leading_eigenvectors(matmul_nt(unf, unf), rank);
}

DenseTensor project_all_but(const DenseTensor& x, const std::vector<Matrix>& factors, std::size_t skip) {
  DenseTensor y = x;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k == skip) continue;
    y = mode_n_product(y, factors[k].transposed(), k);
  }
  return y;
}

DenseTensor project_core(const DenseTensor& x, const std::vector<Matrix>& factors) {
  return project_all_but(x, factors, factors.size());
}

}  // namespace

TuckerDecomposition tucker_hosvd(const DenseTensor& x, const Shape& ranks) {
  validate_ranks(x, ranks);
  TuckerDecomposition d;
  for (std::size_t k = 0; k < x.order(); ++k) d.factors.push_back(leading_left_singular(x, k, ranks[k]));
  d.core = project_core(x, d.factors);
  return d;
}

TuckerResult tucker_hooi(const DenseTensor& x, const Shape& ranks, const TuckerOptions& opts) {
  TuckerResult res;
  res.decomposition = tucker_hosvd(x, ranks);
  res.hosvd_rel_error = relative_error(x, tucker_reconstruct(res.decomposition));
  res.rel_error = res.hosvd_rel_error;
  res.error_history.push_back(res.rel_error);

  auto current = res.decomposition;
  double prev = res.rel_error;
  for (int iter = 0; iter < opts.max_iters && prev > 1e-15; ++iter) {
    for (std::size_t n = 0; n < x.order(); ++n) {
      current.factors[n] = leading_left_singular(project_all_but(x, current.factors, n), n, ranks[n]);
    }
    current.core = project_core(x, current.factors);
    const double err = relative_error(x, tucker_reconstruct(current));
    res.error_history.push_back(err);
    if (err <= res.rel_error) {
      res.rel_error = err;
      res.decomposition = current;
    }
    if (std::abs(prev - err) < opts.tol) break;
    prev = err;
  }
  return res;
}

std::size_t tucker_param_count(const Shape& shape, const Shape& ranks) {
  if (shape.size() != ranks.size()) throw std::invalid_argument("tucker_param_count: shape/rank length mismatch");
  std::size_t core = 1;
  std::size_t factors = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    core *= ranks[k];
    factors += shape[k] * ranks[k];
  }
  return core + factors;
}

std::size_t param_count(const TuckerDecomposition& d) { return tucker_param_count(d.shape(), d.ranks()); }

}  // namespace tenrl::decomp
