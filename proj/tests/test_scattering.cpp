#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tenrl/scattering.hpp"
#include "test_util.hpp"

using namespace tenrl;
using namespace tenrl::scattering;
using tenrl::testing::random_tensor;

namespace {

std::vector<Complex> naive_dft2(const std::vector<Complex>& x, std::size_t h, std::size_t w) {
  std::vector<Complex> out(h * w);
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double angle = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * i) / static_cast<double>(h) + static_cast<double>(v * j) / static_cast<double>(w));
          s += x[i * w + j] * std::polar(1.0, angle);
        }
      out[u * w + v] = s;
    }
  return out;
}

std::vector<Complex> random_signal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

double max_complex_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Dft, MatchesNaiveTransformForPowerOfTwoAndOtherSizes) {
  std::mt19937_64 rng(1);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{8, 16}, {6, 10}, {5, 8}}) {
    const auto x = random_signal(h * w, rng);
    auto y = x;
    Dft2d dft(h, w);
    dft.forward(y);
    EXPECT_LT(max_complex_diff(y, naive_dft2(x, h, w)), 1e-9) << h << "x" << w;
    dft.inverse(y);
    EXPECT_LT(max_complex_diff(y, x), 1e-12) << h << "x" << w;
  }
}

TEST(CircularConv, MatchesDirectPeriodicSum) {
  std::mt19937_64 rng(2);
  const DenseTensor x = random_tensor({6, 8}, rng);
  const DenseTensor f = random_tensor({6, 8}, rng);
  const DenseTensor y = circular_conv2d(x, f);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < 6; ++p)
        for (std::size_t q = 0; q < 8; ++q) s += x.at({p, q}) * f.at({(i + 6 - p) % 6, (j + 8 - q) % 8});
      EXPECT_NEAR(y.at({i, j}), s, 1e-10);
    }
  EXPECT_THROW(circular_conv2d(x, random_tensor({8, 6}, rng)), std::invalid_argument);
}

TEST(FilterBank, LittlewoodPaleyBoundAndLayout) {
  for (int J : {1, 2, 3}) {
    const ScatteringConfig cfg{J, 6, 2, 32, 32};
    const auto bank = build_filter_bank(cfg);
    ASSERT_EQ(bank.psi.size(), static_cast<std::size_t>(J * 6));
    EXPECT_LE(bank.littlewood_paley_max(), 1.0 + 1e-12);
    EXPECT_GT(bank.littlewood_paley_max(), 0.5);
    EXPECT_DOUBLE_EQ(bank.phi[0], 1.0);
    for (std::size_t k = 0; k < bank.psi.size(); ++k) {
      EXPECT_EQ(bank.psi[k].j, static_cast<int>(k) / 6);
      EXPECT_EQ(bank.psi[k].theta, static_cast<int>(k) % 6);
      EXPECT_LT(std::abs(bank.psi[k].freq[0]), 1e-12) << "band-pass filters have zero mean";
    }
  }
}

TEST(FilterBank, WaveletsAreLocalizedInSpace) {
  const ScatteringConfig cfg{2, 4, 1, 32, 32};
  const auto bank = build_filter_bank(cfg);
  const auto psi = bank.spatial_psi(0);
  double near = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) {
      const double e = std::norm(psi[i * 32 + j]);
      const std::size_t di = std::min(i, 32 - i);
      const std::size_t dj = std::min(j, 32 - j);
      total += e;
      if (di <= 6 && dj <= 6) near += e;
    }
  EXPECT_GT(near / total, 0.95);
}

TEST(FilterBank, RejectsInvalidConfigurations) {
  EXPECT_THROW(build_filter_bank({0, 4, 2, 16, 16}), std::invalid_argument);
  EXPECT_THROW(build_filter_bank({2, 0, 2, 16, 16}), std::invalid_argument);
  EXPECT_THROW(build_filter_bank({2, 4, 3, 16, 16}), std::invalid_argument);
  EXPECT_THROW(build_filter_bank({3, 4, 2, 12, 12}), std::invalid_argument);
}

TEST(Scatter, ChannelCountsAndPathOrder) {
  for (int order = 0; order <= 2; ++order)
    for (int J = 1; J <= 3; ++J) {
      const ScatteringConfig cfg{J, 3, order, 16, 16};
      std::size_t expected = 1;
      if (order >= 1) expected += static_cast<std::size_t>(J * 3);
      if (order >= 2) expected += static_cast<std::size_t>(9 * J * (J - 1) / 2);
      EXPECT_EQ(cfg.channels(), expected);
      const auto paths = path_table(cfg, 2);
      ASSERT_EQ(paths.size(), 2 * expected);
      for (const auto& p : paths) {
        if (p.order == 2) {
          EXPECT_GT(p.j2, p.j1);
        }
      }
      EXPECT_EQ(paths[0].order, 0);
      EXPECT_EQ(paths[expected].input_channel, 1u);
    }
}

TEST(Scatter, OutputShapeAndChannelIndependence) {
  std::mt19937_64 rng(3);
  const ScatteringConfig cfg{2, 4, 2, 16, 16};
  const auto bank = build_filter_bank(cfg);
  const DenseTensor x = random_tensor({2, 16, 16}, rng);
  const auto out = scatter(x, bank);
  ASSERT_EQ(out.coefficients.shape(), (Shape{2 * cfg.channels(), 4, 4}));

  DenseTensor second({16, 16});
  std::copy(x.data().begin() + 256, x.data().end(), second.data().begin());
  const auto alone = scatter(second, bank).coefficients;
  const std::size_t per = cfg.channels() * 16;
  for (std::size_t i = 0; i < per; ++i) EXPECT_NEAR(out.coefficients[per + i], alone[i], 1e-12);
}

TEST(Scatter, ConstantImageKeepsOnlyOrderZero) {
  const ScatteringConfig cfg{2, 4, 2, 16, 16};
  const auto out = scatter(DenseTensor({16, 16}, 2.5), build_filter_bank(cfg));
  const std::size_t plane = 16;
  for (std::size_t k = 0; k < out.paths.size(); ++k)
    for (std::size_t i = 0; i < plane; ++i) {
      const double v = out.coefficients[k * plane + i];
      if (out.paths[k].order == 0) {
        EXPECT_NEAR(v, 2.5, 1e-12);
      } else {
        EXPECT_LT(std::abs(v), 1e-6);
      }
    }
}

TEST(Scatter, TranslationCovariantBeforeSubsampling) {
  std::mt19937_64 rng(4);
  const ScatteringConfig cfg{2, 4, 2, 16, 16};
  const auto bank = build_filter_bank(cfg);
  const DenseTensor x = random_tensor({16, 16}, rng);
  DenseTensor y({16, 16});
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) y.at({(i + 7) % 16, (j + 2) % 16}) = x.at({i, j});
  const auto sx = scatter(x, bank, {false}).coefficients;
  const auto sy = scatter(y, bank, {false}).coefficients;
  double worst = 0.0;
  for (std::size_t k = 0; k < sx.extent(0); ++k)
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) worst = std::max(worst, std::abs(sy.at({k, (i + 7) % 16, (j + 2) % 16}) - sx.at({k, i, j})));
  EXPECT_LT(worst, 1e-10);
}

TEST(Scatter, NonExpansive) {
  std::mt19937_64 rng(5);
  const ScatteringConfig cfg{3, 4, 2, 16, 16};
  const auto bank = build_filter_bank(cfg);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseTensor a = random_tensor({16, 16}, rng);
    DenseTensor b = a;
    std::normal_distribution<double> g(0.0, trial % 2 ? 1.0 : 1e-3);
    for (auto& v : b.data()) v += g(rng);
    const auto sa = scatter(a, bank, {false}).coefficients;
    const auto sb = scatter(b, bank, {false}).coefficients;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) num += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    for (std::size_t i = 0; i < a.size(); ++i) den += (a[i] - b[i]) * (a[i] - b[i]);
    EXPECT_LE(num, den * (1.0 + 1e-12));
  }
}

TEST(Scatter, PathTableJsonListsEveryPath) {
  const auto paths = path_table({1, 2, 2, 8, 8}, 1);
  const std::string json = path_table_json(paths);
  EXPECT_NE(json.find("\"order\""), std::string::npos);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = json.find("\"order\"", pos)) != std::string::npos; ++pos) ++count;
  EXPECT_EQ(count, paths.size());
}

TEST(Scatter, RejectsMismatchedInput) {
  const auto bank = build_filter_bank({1, 2, 1, 8, 8});
  EXPECT_THROW(scatter(DenseTensor({8, 4}), bank), std::invalid_argument);
  EXPECT_THROW(scatter(DenseTensor({1, 1, 8, 8}), bank), std::invalid_argument);
}
