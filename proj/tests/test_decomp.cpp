#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tenrl/decomp.hpp"
#include "test_util.hpp"

using namespace tenrl;
using namespace tenrl::decomp;
using tenrl::testing::random_matrix;
using tenrl::testing::random_tensor;

namespace {

CPDecomposition planted_cp(const Shape& shape, std::size_t rank, std::mt19937_64& rng) {
  CPDecomposition d;
  for (std::size_t r = 0; r < rank; ++r) d.weights.push_back(1.0 + static_cast<double>(r));
  for (auto e : shape) d.factors.push_back(random_matrix(e, rank, rng));
  return d;
}

TuckerDecomposition planted_tucker(const Shape& shape, const Shape& ranks, std::mt19937_64& rng) {
  TuckerDecomposition d;
  d.core = random_tensor(ranks, rng);
  for (std::size_t k = 0; k < shape.size(); ++k) d.factors.push_back(random_matrix(shape[k], ranks[k], rng));
  return d;
}

}  // namespace

TEST(Cp, ReconstructMatchesSumOfOuterProducts) {
  std::mt19937_64 rng(1);
  const CPDecomposition d = planted_cp({3, 4, 2}, 2, rng);
  const DenseTensor x = cp_reconstruct(d);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < 2; ++r) s += d.weights[r] * d.factors[0](i, r) * d.factors[1](j, r) * d.factors[2](k, r);
        EXPECT_NEAR(x.at({i, j, k}), s, 1e-13);
      }
}

TEST(Cp, RecoversPlantedRankWithMonotoneFit) {
  std::mt19937_64 rng(2);
  for (const Shape& shape : {Shape{5, 6}, Shape{4, 5, 6}, Shape{3, 4, 3, 5}, Shape{8, 8, 8}}) {
    const DenseTensor x = cp_reconstruct(planted_cp(shape, 3, rng));
    CPOptions opts;
    opts.max_iters = 1000;
    opts.tol = 1e-15;
    const auto res = cp_als(x, 3, opts);
    EXPECT_LT(res.rel_error, 1e-8);
    for (std::size_t i = 1; i < res.error_history.size(); ++i) {
      EXPECT_LE(res.error_history[i], res.error_history[i - 1] + 1e-12) << "sweep " << i;
    }
    for (std::size_t k = 0; k < shape.size(); ++k)
      for (std::size_t r = 0; r < 3; ++r) {
        double n = 0.0;
        for (std::size_t i = 0; i < shape[k]; ++i) n += res.decomposition.factors[k](i, r) * res.decomposition.factors[k](i, r);
        EXPECT_NEAR(n, 1.0, 1e-12);
      }
  }
}

TEST(Cp, SameSeedIsDeterministic) {
  std::mt19937_64 rng(3);
  const DenseTensor x = random_tensor({4, 4, 4}, rng);
  CPOptions opts;
  opts.seed = 9;
  const auto a = cp_als(x, 2, opts);
  const auto b = cp_als(x, 2, opts);
  EXPECT_EQ(a.error_history, b.error_history);
  EXPECT_EQ(a.decomposition.weights, b.decomposition.weights);
}

TEST(Cp, ZeroTensorAndBadArguments) {
  const auto zero = cp_als(DenseTensor({3, 3}), 2);
  EXPECT_EQ(zero.rel_error, 0.0);
  EXPECT_EQ(zero.decomposition.weights, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(cp_als(DenseTensor({3, 3}, 1.0), 0), std::invalid_argument);
  EXPECT_THROW(cp_als(DenseTensor({3}, 1.0), 1), std::invalid_argument);
}

TEST(Tucker, FullRanksAreExact) {
  std::mt19937_64 rng(4);
  for (const Shape& shape : {Shape{3, 5}, Shape{2, 7, 4}, Shape{3, 2, 4, 5}}) {
    const DenseTensor x = random_tensor(shape, rng);
    EXPECT_LT(tucker_hooi(x, shape).rel_error, 1e-12);
    EXPECT_LT(relative_error(x, tucker_reconstruct(tucker_hosvd(x, shape))), 1e-12);
  }
}

TEST(Tucker, RecoversPlantedMultilinearRank) {
  std::mt19937_64 rng(5);
  const Shape shape{6, 7, 5};
  const Shape ranks{2, 3, 2};
  const DenseTensor x = tucker_reconstruct(planted_tucker(shape, ranks, rng));
  const auto res = tucker_hooi(x, ranks);
  EXPECT_LT(res.rel_error, 1e-10);
  EXPECT_EQ(res.decomposition.ranks(), ranks);
  for (const auto& f : res.decomposition.factors) {
    const Matrix g = matmul_tn(f, f);
    EXPECT_LT(max_abs_diff(g.data(), Matrix::identity(f.cols()).data()), 1e-10);
  }
}

TEST(Tucker, HooiNeverWorseThanHosvdAndMonotone) {
  std::mt19937_64 rng(6);
  const DenseTensor x = random_tensor({6, 6, 6}, rng);
  const auto res = tucker_hooi(x, {3, 2, 4});
  EXPECT_LE(res.rel_error, res.hosvd_rel_error + 1e-12);
  for (std::size_t i = 1; i < res.error_history.size(); ++i) {
    EXPECT_LE(res.error_history[i], res.error_history[i - 1] + 1e-12);
  }
}

TEST(Tucker, ReconstructionIsIndependentOfModeOrder) {
  std::mt19937_64 rng(7);
  const TuckerDecomposition d = planted_tucker({3, 4, 5, 2}, {2, 2, 3, 2}, rng);
  const DenseTensor ref = tucker_reconstruct(d);
  std::vector<std::size_t> order(4);
  std::iota(order.begin(), order.end(), 0);
  do {
    const DenseTensor other = tucker_reconstruct(d, order);
    EXPECT_LT(max_abs_diff(ref.data(), other.data()), 1e-12);
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST(Tucker, RejectsRanksAboveExtents) {
  EXPECT_THROW(tucker_hooi(DenseTensor({3, 3}, 1.0), {4, 2}), std::invalid_argument);
  EXPECT_THROW(tucker_hooi(DenseTensor({3, 3}, 1.0), {2}), std::invalid_argument);
}

TEST(ParamCounts, ClosedForms) {
  EXPECT_EQ(cp_param_count({3, 4, 5}, 2), 2u * (1 + 3 + 4 + 5));
  EXPECT_EQ(tucker_param_count({3, 4, 5}, {2, 3, 4}), 2u * 3 * 4 + 3 * 2 + 4 * 3 + 5 * 4);
  std::mt19937_64 rng(8);
  EXPECT_EQ(param_count(planted_tucker({3, 4}, {2, 1}, rng)), tucker_param_count({3, 4}, {2, 1}));
  EXPECT_EQ(param_count(planted_cp({3, 4}, 2, rng)), cp_param_count({3, 4}, 2));
}
