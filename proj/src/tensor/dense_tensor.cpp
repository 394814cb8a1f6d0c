#include "tenrl/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tenrl {

std::size_t shape_size(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have at least one mode");
  for (auto e : shape) {
    if (e == 0) throw std::invalid_argument("tensor extents must be positive");
  }
}

}  // namespace

DenseTensor::DenseTensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape size " + std::to_string(shape_size(shape_)));
  }
}

DenseTensor DenseTensor::scalar(double value) { return DenseTensor({1}, std::vector<double>{value}); }

std::size_t DenseTensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw std::invalid_argument("index order does not match tensor order");
  std::size_t off = 0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= shape_[k]) throw std::out_of_range("tensor index out of range");
    off = off * shape_[k] + index[k];
  }
  return off;
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(std::span<const std::size_t>(index.begin(), index.size()))];
}

DenseTensor DenseTensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) throw std::invalid_argument("reshape must preserve size");
  DenseTensor out(std::move(shape), data_);
  out.dtype_ = dtype_;
  return out;
}

void DenseTensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("matrix data length does not match rows*cols");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_tensor(const DenseTensor& t) {
  if (t.order() == 1) return Matrix(t.extent(0), 1, t.values());
  if (t.order() != 2) throw std::invalid_argument("matrix conversion needs a tensor with 1 or 2 modes");
  return Matrix(t.extent(0), t.extent(1), t.values());
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseTensor Matrix::to_tensor() const { return DenseTensor({rows_, cols_}, data_); }

}  // namespace tenrl
