#pragma once

#include <cstdint>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::optim {

/// f(W) = ½·vec(W − W*)ᵀ (A ⊗ B) vec(W − W*) = ½·tr((W − W*)ᵀ B (W − W*) A)
/// for SPD A (dim_a) and B (dim_b); W is (dim_b × dim_a).
struct KroneckerQuadratic {
  Matrix a;
  Matrix b;
  Matrix target;

  static KroneckerQuadratic random(std::size_t dim_a, std::size_t dim_b, std::uint64_t seed,
                                   double min_eig = 0.05, double max_eig = 2.5);
  double loss(const Matrix& w) const;
  Matrix gradient(const Matrix& w) const;  // B (W − W*) A
};

struct BenchRow {
  std::size_t step = 0;
  double sgd = 0.0;
  double adam = 0.0;
  double kfac = 0.0;
};

struct BenchOptions {
  std::size_t dim_a = 8;
  std::size_t dim_b = 8;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  double lr = 1.0;         // shared by gradient descent and K-FAC
  double adam_lr = 0.05;
  double damping = 0.0;    // K-FAC runs on the exact factors A and B
};

/// Row 0 holds the initial loss; row t the loss after t updates.
std::vector<BenchRow> run_optimizer_bench(const BenchOptions& opts);

}  // namespace tenrl::optim
