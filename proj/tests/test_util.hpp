#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tenrl/tensor.hpp"

namespace tenrl::testing {

inline DenseTensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DenseTensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(r, c);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

}  // namespace tenrl::testing
