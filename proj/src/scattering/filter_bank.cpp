#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tenrl/scattering.hpp"

namespace tenrl::scattering {

void ScatteringConfig::validate() const {
  if (J < 1) throw std::invalid_argument("scattering: J must be at least 1");
  if (L < 1) throw std::invalid_argument("scattering: L must be at least 1");
  if (max_order < 0 || max_order > 2) throw std::invalid_argument("scattering: max_order must be 0, 1 or 2");
  if (J >= 20 || height % subsample() != 0 || width % subsample() != 0) {
    throw std::invalid_argument("scattering: input " + std::to_string(height) + "x" + std::to_string(width) +
                                " is not divisible by 2^J = " + std::to_string(std::size_t{1} << std::min(J, 20)));
  }
}

std::size_t ScatteringConfig::channels() const {
  const auto j = static_cast<std::size_t>(J);
  const auto l = static_cast<std::size_t>(L);
  std::size_t n = 1;
  if (max_order >= 1) n += j * l;
  if (max_order >= 2) n += l * l * j * (j - 1) / 2;
  return n;
}

namespace {

// Periodized anisotropic Gabor atom on an H×W grid, matching the classic
// Morlet construction: envelope σ, slant across the orientation, carrier ξ.
std::vector<Complex> gabor(std::size_t h, std::size_t w, double sigma, double theta, double xi, double slant) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // curvature = R·diag(1, slant²)·Rᵀ / (2σ²)
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double a = (c * c + slant * slant * s * s) * inv;
  const double b = (c * s - slant * slant * c * s) * inv;
  const double d = (s * s + slant * slant * c * c) * inv;
  std::vector<Complex> out(h * w, Complex(0.0, 0.0));
  const int reps = 2;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = 0; col < w; ++col) {
      Complex acc(0.0, 0.0);
      for (int er = -reps; er <= reps; ++er) {
        for (int ec = -reps; ec <= reps; ++ec) {
          const double y = static_cast<double>(r) + er * static_cast<double>(h);
          const double x = static_cast<double>(col) + ec * static_cast<double>(w);
          const double env = std::exp(-(a * x * x + 2.0 * b * x * y + d * y * y));
          const double phase = xi * (x * c + y * s);
          acc += env * Complex(std::cos(phase), std::sin(phase));
        }
      }
      out[r * w + col] = acc;
    }
  }
  const double norm = 2.0 * std::numbers::pi * sigma * sigma / slant;
  for (auto& v : out) v /= norm;
  return out;
}

}  // namespace

FilterBank build_filter_bank(const ScatteringConfig& cfg) {
  cfg.validate();
  const std::size_t h = cfg.height;
  const std::size_t w = cfg.width;
  const Dft2d dft(h, w);
  FilterBank bank;
  bank.config = cfg;

  const double slant = 4.0 / static_cast<double>(cfg.L);
  for (int j = 0; j < cfg.J; ++j) {
    const double sigma = 0.8 * std::pow(2.0, j);
    const double xi = 3.0 / 4.0 * std::numbers::pi / std::pow(2.0, j);
    for (int t = 0; t < cfg.L; ++t) {
      const double theta = static_cast<double>(t) * std::numbers::pi / static_cast<double>(cfg.L);
      auto wave = gabor(h, w, sigma, theta, xi, slant);
      const auto env = gabor(h, w, sigma, theta, 0.0, slant);
      Complex wave_sum(0.0, 0.0);
      Complex env_sum(0.0, 0.0);
      for (std::size_t i = 0; i < wave.size(); ++i) {
        wave_sum += wave[i];
        env_sum += env[i];
      }
      const Complex kappa = wave_sum / env_sum;
      for (std::size_t i = 0; i < wave.size(); ++i) wave[i] -= kappa * env[i];
      dft.forward(wave);
      wave[0] = Complex(0.0, 0.0);  // exact zero mean; the correction above leaves only rounding here
      bank.psi.push_back(BandPass{j, t, std::move(wave)});
    }
  }

  auto low = gabor(h, w, 0.8 * std::pow(2.0, cfg.J), 0.0, 0.0, 1.0);
  double low_sum = 0.0;
  for (const auto& v : low) low_sum += v.real();
  for (auto& v : low) v = Complex(v.real() / low_sum, 0.0);
  dft.forward(low);
  bank.phi.resize(h * w);
  for (std::size_t i = 0; i < low.size(); ++i) bank.phi[i] = low[i].real();
  bank.phi[0] = 1.0;

  // Common scale on the band-pass filters so that the Littlewood-Paley sum
  // for real signals stays below one everywhere.
  std::vector<double> psi_energy(h * w, 0.0);
  for (const auto& p : bank.psi) {
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t mirror = ((h - r) % h) * w + (w - c) % w;
        psi_energy[r * w + c] += 0.5 * (std::norm(p.freq[r * w + c]) + std::norm(p.freq[mirror]));
      }
  }
  const double peak = *std::max_element(psi_energy.begin(), psi_energy.end());
  double scale_sq = 1.0;
  for (std::size_t i = 0; i < psi_energy.size(); ++i) {
    if (psi_energy[i] <= 1e-12 * peak) continue;
    const double room = std::max(0.0, 1.0 - bank.phi[i] * bank.phi[i]);
    scale_sq = std::min(scale_sq, room / psi_energy[i]);
  }
  bank.frame_scale = std::sqrt(scale_sq);
  for (auto& p : bank.psi)
    for (auto& v : p.freq) v *= bank.frame_scale;
  return bank;
}

std::vector<Complex> FilterBank::spatial_psi(std::size_t index) const {
  auto v = psi.at(index).freq;
  Dft2d(config.height, config.width).inverse(v);
  return v;
}

double FilterBank::littlewood_paley_max() const {
  const std::size_t h = config.height;
  const std::size_t w = config.width;
  double best = 0.0;
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      const std::size_t mirror = ((h - r) % h) * w + (w - c) % w;
      double s = phi[i] * phi[i];
      for (const auto& p : psi) s += 0.5 * (std::norm(p.freq[i]) + std::norm(p.freq[mirror]));
      best = std::max(best, s);
    }
  return best;
}

}  // namespace tenrl::scattering
