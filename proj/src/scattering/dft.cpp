#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tenrl/scattering.hpp"

namespace tenrl::scattering {

Dft2d::Axis Dft2d::make_axis(std::size_t n) {
  Axis axis;
  axis.n = n;
  axis.radix2 = n > 1 && (n & (n - 1)) == 0;
  axis.twiddles.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    axis.twiddles[k] = Complex(std::cos(angle), std::sin(angle));
  }
  if (axis.radix2) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    axis.bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      axis.bitrev[i] = r;
    }
  }
  return axis;
}

Dft2d::Dft2d(std::size_t height, std::size_t width)
    : height_(height), width_(width), rows_(make_axis(width)), cols_(make_axis(height)) {
  if (height == 0 || width == 0) throw std::invalid_argument("Dft2d: empty grid");
}

void Dft2d::transform(const Axis& axis, Complex* v, std::size_t stride, bool inverse, std::vector<Complex>& scratch) {
  const std::size_t n = axis.n;
  scratch.resize(n);
  if (axis.radix2) {
    for (std::size_t i = 0; i < n; ++i) scratch[axis.bitrev[i]] = v[i * stride];
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t step = n / len;
      for (std::size_t start = 0; start < n; start += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          Complex w = axis.twiddles[k * step];
          if (inverse) w = std::conj(w);
          const Complex a = scratch[start + k];
          const Complex b = scratch[start + k + len / 2] * w;
          scratch[start + k] = a + b;
          scratch[start + k + len / 2] = a - b;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) v[i * stride] = scratch[i];
    return;
  }
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    std::size_t idx = 0;
    for (std::size_t m = 0; m < n; ++m) {
      const Complex w = inverse ? std::conj(axis.twiddles[idx]) : axis.twiddles[idx];
      acc += v[m * stride] * w;
      idx += k;
      if (idx >= n) idx -= n;
    }
    scratch[k] = acc;
  }
  for (std::size_t k = 0; k < n; ++k) v[k * stride] = scratch[k];
}

void Dft2d::forward(std::vector<Complex>& data) const {
  if (data.size() != height_ * width_) throw std::invalid_argument("Dft2d: buffer size mismatch");
  std::vector<Complex> scratch;
  for (std::size_t r = 0; r < height_; ++r) transform(rows_, data.data() + r * width_, 1, false, scratch);
  for (std::size_t c = 0; c < width_; ++c) transform(cols_, data.data() + c, width_, false, scratch);
}

void Dft2d::inverse(std::vector<Complex>& data) const {
  if (data.size() != height_ * width_) throw std::invalid_argument("Dft2d: buffer size mismatch");
  std::vector<Complex> scratch;
  for (std::size_t r = 0; r < height_; ++r) transform(rows_, data.data() + r * width_, 1, true, scratch);
  for (std::size_t c = 0; c < width_; ++c) transform(cols_, data.data() + c, width_, true, scratch);
  const double norm = 1.0 / static_cast<double>(height_ * width_);
  for (auto& v : data) v *= norm;
}

}  // namespace tenrl::scattering
