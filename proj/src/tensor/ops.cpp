#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tenrl/tensor.hpp"

namespace tenrl {

namespace kernels {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] += s;
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = ap[i];
      if (av == 0.0) continue;
      double* ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

}  // namespace kernels

namespace {

// Splits a shape around `mode` into (product before, extent, product after).
struct ModeSplit {
  std::size_t left;
  std::size_t extent;
  std::size_t right;
};

ModeSplit split_at(const Shape& shape, std::size_t mode) {
  if (mode >= shape.size()) {
    throw std::invalid_argument("mode " + std::to_string(mode) + " out of range for tensor of order " +
                                std::to_string(shape.size()));
  }
  ModeSplit s{1, shape[mode], 1};
  for (std::size_t k = 0; k < mode; ++k) s.left *= shape[k];
  for (std::size_t k = mode + 1; k < shape.size(); ++k) s.right *= shape[k];
  return s;
}

}  // namespace

Matrix unfold(const DenseTensor& x, std::size_t mode) {
  const auto s = split_at(x.shape(), mode);
  Matrix m(s.extent, s.left * s.right);
  const auto src = x.data();
  for (std::size_t l = 0; l < s.left; ++l)
    for (std::size_t i = 0; i < s.extent; ++i)
      for (std::size_t r = 0; r < s.right; ++r) m(i, l * s.right + r) = src[(l * s.extent + i) * s.right + r];
  return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  const auto s = split_at(shape, mode);
  if (m.rows() != s.extent || m.cols() != s.left * s.right) {
    throw std::invalid_argument("fold: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                ", inconsistent with the target shape");
  }
  DenseTensor x(shape);
  auto dst = x.data();
  for (std::size_t l = 0; l < s.left; ++l)
    for (std::size_t i = 0; i < s.extent; ++i)
      for (std::size_t r = 0; r < s.right; ++r) dst[(l * s.extent + i) * s.right + r] = m(i, l * s.right + r);
  return x;
}

DenseTensor mode_n_product(const DenseTensor& x, const Matrix& u, std::size_t mode) {
  const auto s = split_at(x.shape(), mode);
  if (u.cols() != s.extent) {
    throw std::invalid_argument("mode_n_product: factor has " + std::to_string(u.cols()) + " columns, mode extent is " +
                                std::to_string(s.extent));
  }
  Shape out_shape = x.shape();
  out_shape[mode] = u.rows();
  DenseTensor y(out_shape);
  const auto src = x.data();
  auto dst = y.data();
  const std::size_t j_ext = u.rows();
  // For each left block: Y_l (J × R) = U (J × I) · X_l (I × R).
  for (std::size_t l = 0; l < s.left; ++l) {
    kernels::gemm_nn(j_ext, s.right, s.extent, u.data().data(), src.data() + l * s.extent * s.right,
                     dst.data() + l * j_ext * s.right);
  }
  return y;
}

DenseTensor generalized_inner_product(const DenseTensor& x, const DenseTensor& y, std::size_t n) {
  if (n > x.order() || n > y.order()) throw std::invalid_argument("generalized_inner_product: too many contracted modes");
  const std::size_t lead_modes = x.order() - n;
  std::size_t contracted = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (x.extent(lead_modes + k) != y.extent(k)) {
      throw std::invalid_argument("generalized_inner_product: contracted extents differ at position " +
                                  std::to_string(k));
    }
    contracted *= y.extent(k);
  }
  Shape out_shape(x.shape().begin(), x.shape().begin() + static_cast<std::ptrdiff_t>(lead_modes));
  out_shape.insert(out_shape.end(), y.shape().begin() + static_cast<std::ptrdiff_t>(n), y.shape().end());
  const std::size_t rows = x.size() / contracted;
  const std::size_t cols = y.size() / contracted;
  if (out_shape.empty()) out_shape = {1};
  DenseTensor out(out_shape);
  kernels::gemm_nn(rows, cols, contracted, x.data().data(), y.data().data(), out.data().data());
  return out;
}

DenseTensor outer_product(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) throw std::invalid_argument("outer_product needs at least one vector");
  Shape shape;
  for (const auto& v : vectors) {
    if (v.empty()) throw std::invalid_argument("outer_product vectors must be nonempty");
    shape.push_back(v.size());
  }
  std::vector<double> acc{1.0};
  for (const auto& v : vectors) {
    std::vector<double> next(acc.size() * v.size());
    for (std::size_t a = 0; a < acc.size(); ++a)
      for (std::size_t i = 0; i < v.size(); ++i) next[a * v.size() + i] = acc[a] * v[i];
    acc = std::move(next);
  }
  return DenseTensor(std::move(shape), std::move(acc));
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double av = a(i, j);
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = av * b(p, q);
    }
  return k;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  kernels::gemm_nn(a.rows(), b.cols(), a.cols(), a.data().data(), b.data().data(), c.data().data());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  kernels::gemm_tn(a.cols(), b.cols(), a.rows(), a.data().data(), b.data().data(), c.data().data());
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: column counts differ");
  Matrix c(a.rows(), b.rows());
  kernels::gemm_nt(a.rows(), b.rows(), a.cols(), a.data().data(), b.data().data(), c.data().data());
  return c;
}

double frobenius_norm(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> vec(const Matrix& m) {
  std::vector<double> v(m.size());
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) v[c * m.rows() + r] = m(r, c);
  return v;
}

Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: length mismatch");
  Matrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = v[c * rows + r];
  return m;
}

}  // namespace tenrl
