#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace tenrl {

using Shape = std::vector<std::size_t>;

/// Storage precision used when a tensor is serialized. Arithmetic is always
/// carried out in double precision.
enum class DType : std::uint8_t { kFloat64 = 0, kFloat32 = 1 };

std::size_t shape_size(std::span<const std::size_t> shape);

/// N-dimensional real array, row-major (last index fastest).
///
/// A default-constructed tensor is an empty placeholder with no modes. Every
/// tensor built through a shape constructor has at least one mode and all
/// extents positive.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor scalar(double value);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  DType dtype() const { return dtype_; }
  void set_dtype(DType dtype) { dtype_ = dtype; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  std::size_t offset(std::span<const std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same data viewed under a different shape of equal size.
  DenseTensor reshaped(Shape shape) const;

  void fill(double value);

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
  DType dtype_ = DType::kFloat64;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_tensor(const DenseTensor& t);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transposed() const;
  DenseTensor to_tensor() const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Multilinear operations. Modes are zero-based throughout.
// ---------------------------------------------------------------------------

/// Mode-n unfolding: row index is i_mode, column index enumerates the other
/// indices in their original order, last fastest.
Matrix unfold(const DenseTensor& x, std::size_t mode);

/// Inverse of unfold for a tensor of the given shape.
DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape);

/// x ×_mode u, with u of shape (J, I_mode). The result replaces extent I_mode by J.
DenseTensor mode_n_product(const DenseTensor& x, const Matrix& u, std::size_t mode);

/// Contracts the last `n` modes of x against the first `n` modes of y.
/// Contracting every mode of both operands yields a tensor of shape (1).
DenseTensor generalized_inner_product(const DenseTensor& x, const DenseTensor& y, std::size_t n);

DenseTensor outer_product(std::span<const std::vector<double>> vectors);

Matrix kronecker(const Matrix& a, const Matrix& b);

// Small dense helpers shared by the other modules.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // aᵀ·b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a·bᵀ
double frobenius_norm(std::span<const double> values);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Column-stacking vectorization.
std::vector<double> vec(const Matrix& m);
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);

// Raw kernels on contiguous row-major buffers; results are accumulated into c.
namespace kernels {
// c(m×n) += a(m×k) · b(k×n)
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
// c(m×n) += a(m×k) · b(n×k)ᵀ
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
// c(m×n) += a(k×m)ᵀ · b(k×n)
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
}  // namespace kernels

}  // namespace tenrl
