#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tenrl/scattering.hpp"

namespace tenrl::scattering {

DenseTensor circular_conv2d(const DenseTensor& x, const DenseTensor& filter) {
  if (x.order() != 2 || filter.shape() != x.shape()) {
    throw std::invalid_argument("circular_conv2d: image and filter must share one H×W shape");
  }
  const std::size_t h = x.extent(0);
  const std::size_t w = x.extent(1);
  const Dft2d dft(h, w);
  std::vector<Complex> xf(x.size());
  std::vector<Complex> ff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xf[i] = Complex(x[i], 0.0);
    ff[i] = Complex(filter[i], 0.0);
  }
  dft.forward(xf);
  dft.forward(ff);
  for (std::size_t i = 0; i < xf.size(); ++i) xf[i] *= ff[i];
  dft.inverse(xf);
  DenseTensor y(x.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xf[i].real();
  return y;
}

std::vector<ScatterPath> path_table(const ScatteringConfig& cfg, std::size_t input_channels) {
  std::vector<ScatterPath> paths;
  for (std::size_t c = 0; c < input_channels; ++c) {
    paths.push_back({0, -1, -1, -1, -1, c});
    if (cfg.max_order >= 1) {
      for (int j1 = 0; j1 < cfg.J; ++j1)
        for (int t1 = 0; t1 < cfg.L; ++t1) paths.push_back({1, j1, t1, -1, -1, c});
    }
    if (cfg.max_order >= 2) {
      for (int j1 = 0; j1 < cfg.J; ++j1)
        for (int t1 = 0; t1 < cfg.L; ++t1)
          for (int j2 = j1 + 1; j2 < cfg.J; ++j2)
            for (int t2 = 0; t2 < cfg.L; ++t2) paths.push_back({2, j1, t1, j2, t2, c});
    }
  }
  return paths;
}

std::string path_table_json(const std::vector<ScatterPath>& paths) {
  std::ostringstream os;
  os << "{\n  \"paths\": [\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    os << "    {\"channel\": " << i << ", \"input_channel\": " << p.input_channel << ", \"order\": " << p.order
       << ", \"j1\": " << p.j1 << ", \"theta1\": " << p.theta1 << ", \"j2\": " << p.j2 << ", \"theta2\": " << p.theta2
       << "}" << (i + 1 < paths.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

namespace {

class Transform {
 public:
  Transform(const FilterBank& bank, bool subsample)
      : bank_(bank),
        h_(bank.config.height),
        w_(bank.config.width),
        step_(subsample ? bank.config.subsample() : 1),
        full_(h_, w_),
        small_(h_ / step_, w_ / step_) {}

  std::size_t out_h() const { return h_ / step_; }
  std::size_t out_w() const { return w_ / step_; }

  // Lowpass-filters a spectrum and writes the (subsampled) real result.
  void lowpass_into(const std::vector<Complex>& spectrum, double* out) {
    const std::size_t oh = out_h();
    const std::size_t ow = out_w();
    // Subsampling by s in space folds the spectrum onto an (H/s)×(W/s) grid.
    folded_.assign(oh * ow, Complex(0.0, 0.0));
    for (std::size_t r = 0; r < h_; ++r)
      for (std::size_t c = 0; c < w_; ++c) {
        const std::size_t i = r * w_ + c;
        folded_[(r % oh) * ow + (c % ow)] += spectrum[i] * bank_.phi[i];
      }
    small_.inverse(folded_);
    const double norm = 1.0 / static_cast<double>(step_ * step_);
    for (std::size_t i = 0; i < folded_.size(); ++i) out[i] = folded_[i].real() * norm;
  }

  // |IDFT(spectrum · ψ̂)| returned as a spectrum again.
  std::vector<Complex> modulus_spectrum(const std::vector<Complex>& spectrum, const BandPass& psi) {
    std::vector<Complex> u(spectrum.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = spectrum[i] * psi.freq[i];
    full_.inverse(u);
    for (auto& v : u) v = Complex(std::abs(v), 0.0);
    full_.forward(u);
    return u;
  }

  const Dft2d& full() const { return full_; }

 private:
  const FilterBank& bank_;
  std::size_t h_;
  std::size_t w_;
  std::size_t step_;
  Dft2d full_;
  Dft2d small_;
  std::vector<Complex> folded_;
};

}  // namespace

ScatteringOutput scatter(const DenseTensor& x, const FilterBank& bank, const ScatterOptions& opts) {
  const auto& cfg = bank.config;
  std::size_t channels = 1;
  if (x.order() == 3) {
    channels = x.extent(0);
  } else if (x.order() != 2) {
    throw std::invalid_argument("scatter: input must be (H, W) or (C, H, W)");
  }
  const std::size_t h = x.extent(x.order() - 2);
  const std::size_t w = x.extent(x.order() - 1);
  if (h != cfg.height || w != cfg.width) throw std::invalid_argument("scatter: input size does not match the filter bank");
  if (bank.psi.size() != static_cast<std::size_t>(cfg.J * cfg.L)) throw std::invalid_argument("scatter: incomplete filter bank");

  Transform tf(bank, opts.subsample);
  const std::size_t per_channel = cfg.channels();
  const std::size_t plane = tf.out_h() * tf.out_w();
  ScatteringOutput out{DenseTensor({channels * per_channel, tf.out_h(), tf.out_w()}), path_table(cfg, channels)};
  double* dst = out.coefficients.data().data();

  std::vector<Complex> spectrum(h * w);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < h * w; ++i) spectrum[i] = Complex(x[c * h * w + i], 0.0);
    tf.full().forward(spectrum);

    tf.lowpass_into(spectrum, dst);
    dst += plane;
    if (cfg.max_order < 1) continue;

    std::vector<std::vector<Complex>> first(bank.psi.size());
    for (std::size_t p = 0; p < bank.psi.size(); ++p) {
      first[p] = tf.modulus_spectrum(spectrum, bank.psi[p]);
      tf.lowpass_into(first[p], dst);
      dst += plane;
    }
    if (cfg.max_order < 2) continue;

    for (std::size_t p1 = 0; p1 < bank.psi.size(); ++p1) {
      for (std::size_t p2 = 0; p2 < bank.psi.size(); ++p2) {
        if (bank.psi[p2].j <= bank.psi[p1].j) continue;
        const auto second = tf.modulus_spectrum(first[p1], bank.psi[p2]);
        tf.lowpass_into(second, dst);
        dst += plane;
      }
    }
  }
  return out;
}

}  // namespace tenrl::scattering
