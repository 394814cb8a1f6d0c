#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::scattering {

using Complex = std::complex<double>;

/// Separable 2-D discrete Fourier transform on a fixed H×W grid. Power-of-two
/// lengths use radix-2 butterflies; other lengths a direct DFT.
class Dft2d {
 public:
  Dft2d(std::size_t height, std::size_t width);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  void forward(std::vector<Complex>& data) const;
  /// Includes the 1/(H·W) normalization.
  void inverse(std::vector<Complex>& data) const;

 private:
  struct Axis {
    std::size_t n = 0;
    std::vector<Complex> twiddles;  // exp(-2πik/n)
    std::vector<std::size_t> bitrev;
    bool radix2 = false;
  };
  static Axis make_axis(std::size_t n);
  static void transform(const Axis& axis, Complex* v, std::size_t stride, bool inverse, std::vector<Complex>& scratch);

  std::size_t height_;
  std::size_t width_;
  Axis rows_;
  Axis cols_;
};

struct ScatteringConfig {
  int J = 3;
  int L = 8;
  int max_order = 2;
  std::size_t height = 32;
  std::size_t width = 32;

  void validate() const;
  std::size_t subsample() const { return std::size_t{1} << J; }
  /// Output channels per input channel: 1 + J·L + L²·J(J−1)/2 at order 2.
  std::size_t channels() const;
};

struct BandPass {
  int j = 0;
  int theta = 0;
  std::vector<Complex> freq;  // H×W row-major
};

/// Morlet band-pass filters and a Gaussian lowpass, stored in the frequency
/// domain at full input resolution. Immutable once built.
struct FilterBank {
  ScatteringConfig config;
  std::vector<BandPass> psi;  // ordered by (j, theta)
  std::vector<double> phi;    // real lowpass spectrum, phi[0] == 1
  double frame_scale = 1.0;   // common factor applied to every band-pass filter

  /// Spatial-domain band-pass filter (complex) recovered by inverse DFT.
  std::vector<Complex> spatial_psi(std::size_t index) const;
  /// max over ω of |φ̂(ω)|² + ½Σ_λ(|ψ̂_λ(ω)|² + |ψ̂_λ(−ω)|²).
  double littlewood_paley_max() const;
};

FilterBank build_filter_bank(const ScatteringConfig& cfg);

/// Periodic 2-D convolution of two real H×W images, computed in the frequency domain.
DenseTensor circular_conv2d(const DenseTensor& x, const DenseTensor& filter);

struct ScatterPath {
  int order = 0;
  int j1 = -1;
  int theta1 = -1;
  int j2 = -1;
  int theta2 = -1;
  std::size_t input_channel = 0;
};

struct ScatteringOutput {
  DenseTensor coefficients;  // (C·K, H/2^J, W/2^J)
  std::vector<ScatterPath> paths;
};

struct ScatterOptions {
  /// When false, coefficients stay at full resolution (used to check translation covariance).
  bool subsample = true;
};

/// x is (H, W) or (C, H, W); channels are transformed independently.
ScatteringOutput scatter(const DenseTensor& x, const FilterBank& bank, const ScatterOptions& opts = {});

std::vector<ScatterPath> path_table(const ScatteringConfig& cfg, std::size_t input_channels);
std::string path_table_json(const std::vector<ScatterPath>& paths);

}  // namespace tenrl::scattering
