#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tenrl/linalg.hpp"
#include "tenrl/tensor.hpp"
#include "tenrl/tnsr_io.hpp"
#include "test_util.hpp"

using namespace tenrl;
using tenrl::testing::random_matrix;
using tenrl::testing::random_tensor;

namespace {

// Multi-index of a flat row-major offset.
std::vector<std::size_t> index_of(std::size_t flat, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

}  // namespace

TEST(DenseTensor, RowMajorOffsets) {
  DenseTensor t({2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  EXPECT_EQ(t.at({1, 2, 3}), 23.0);
  EXPECT_EQ(t.at({0, 1, 0}), 4.0);
  EXPECT_THROW(t.at({2, 0, 0}), std::out_of_range);
  EXPECT_THROW(DenseTensor({2, 0}), std::invalid_argument);
  EXPECT_THROW(DenseTensor(Shape{}), std::invalid_argument);
  EXPECT_THROW(t.reshaped({5, 5}), std::invalid_argument);
}

TEST(Unfold, MatchesIndexDefinition) {
  std::mt19937_64 rng(1);
  const DenseTensor x = random_tensor({3, 4, 2, 5}, rng);
  for (std::size_t mode = 0; mode < 4; ++mode) {
    const Matrix m = unfold(x, mode);
    ASSERT_EQ(m.rows(), x.extent(mode));
    ASSERT_EQ(m.cols(), x.size() / x.extent(mode));
    for (std::size_t flat = 0; flat < x.size(); ++flat) {
      const auto idx = index_of(flat, x.shape());
      // Column enumerates the remaining indices in order, last fastest.
      std::size_t col = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        if (k == mode) continue;
        col = col * x.extent(k) + idx[k];
      }
      EXPECT_EQ(m(idx[mode], col), x[flat]);
    }
  }
}

TEST(Unfold, FoldInvertsUnfold) {
  std::mt19937_64 rng(2);
  const DenseTensor x = random_tensor({2, 3, 4}, rng);
  for (std::size_t mode = 0; mode < 3; ++mode) EXPECT_EQ(fold(unfold(x, mode), mode, x.shape()), x);
  EXPECT_THROW(unfold(x, 3), std::invalid_argument);
}

TEST(ModeProduct, MatchesLoopOracle) {
  std::mt19937_64 rng(3);
  const DenseTensor x = random_tensor({3, 4, 2}, rng);
  const Matrix u = random_matrix(5, 4, rng);
  const DenseTensor y = mode_n_product(x, u, 1);
  ASSERT_EQ(y.shape(), (Shape{3, 5, 2}));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < 4; ++r) s += u(j, r) * x.at({i, r, k});
        EXPECT_NEAR(y.at({i, j, k}), s, 1e-13);
      }
  EXPECT_THROW(mode_n_product(x, random_matrix(2, 3, rng), 1), std::invalid_argument);
}

TEST(ModeProduct, DistinctModesCommuteAndSameModeComposes) {
  std::mt19937_64 rng(4);
  const DenseTensor x = random_tensor({3, 4, 5}, rng);
  const Matrix a = random_matrix(2, 3, rng);
  const Matrix b = random_matrix(6, 5, rng);
  const DenseTensor ab = mode_n_product(mode_n_product(x, a, 0), b, 2);
  const DenseTensor ba = mode_n_product(mode_n_product(x, b, 2), a, 0);
  EXPECT_LT(max_abs_diff(ab.data(), ba.data()), 1e-12);

  const Matrix c = random_matrix(3, 2, rng);
  const DenseTensor twice = mode_n_product(mode_n_product(x, a, 0), c, 0);
  const DenseTensor once = mode_n_product(x, matmul(c, a), 0);
  EXPECT_LT(max_abs_diff(twice.data(), once.data()), 1e-12);
}

TEST(GeneralizedInnerProduct, MatchesLoopOracle) {
  std::mt19937_64 rng(5);
  const DenseTensor x = random_tensor({2, 3, 4}, rng);
  const DenseTensor y = random_tensor({3, 4, 5}, rng);
  const DenseTensor z = generalized_inner_product(x, y, 2);
  ASSERT_EQ(z.shape(), (Shape{2, 5}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t l = 0; l < 5; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 4; ++k) s += x.at({i, j, k}) * y.at({j, k, l});
      EXPECT_NEAR(z.at({i, l}), s, 1e-13);
    }
  const DenseTensor full = generalized_inner_product(x, x, 3);
  ASSERT_EQ(full.shape(), (Shape{1}));
  EXPECT_NEAR(full[0], frobenius_norm(x.data()) * frobenius_norm(x.data()), 1e-12);
  EXPECT_THROW(generalized_inner_product(x, y, 1), std::invalid_argument);
}

TEST(OuterProduct, EntriesAreProducts) {
  const std::vector<std::vector<double>> v{{1.0, 2.0}, {3.0, 4.0, 5.0}, {-1.0, 0.5}};
  const DenseTensor t = outer_product(v);
  ASSERT_EQ(t.shape(), (Shape{2, 3, 2}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(t.at({i, j, k}), v[0][i] * v[1][j] * v[2][k]);
}

TEST(Kronecker, MixedProductAndVecIdentity) {
  std::mt19937_64 rng(6);
  const Matrix a = random_matrix(2, 3, rng);
  const Matrix b = random_matrix(4, 2, rng);
  const Matrix c = random_matrix(3, 2, rng);
  const Matrix d = random_matrix(2, 3, rng);
  const Matrix lhs = matmul(kronecker(a, b), kronecker(c, d));
  const Matrix rhs = kronecker(matmul(a, c), matmul(b, d));
  EXPECT_LT(max_abs_diff(lhs.data(), rhs.data()), 1e-12);

  // vec(A·X·B) = (Bᵀ ⊗ A)·vec(X) with column-stacking vec.
  const Matrix x = random_matrix(3, 4, rng);
  const Matrix bb = random_matrix(4, 2, rng);
  const auto left = vec(matmul(matmul(a, x), bb));
  const Matrix k = kronecker(bb.transposed(), a);
  const auto vx = vec(x);
  std::vector<double> right(k.rows(), 0.0);
  for (std::size_t r = 0; r < k.rows(); ++r)
    for (std::size_t s = 0; s < k.cols(); ++s) right[r] += k(r, s) * vx[s];
  EXPECT_LT(max_abs_diff(left, right), 1e-12);
  EXPECT_EQ(unvec(vx, 3, 4), x);
}

TEST(Kernels, GemmVariantsAccumulate) {
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(3, 4, rng);
  const Matrix b = random_matrix(4, 5, rng);
  const Matrix expect = matmul(a, b);
  std::vector<double> c(15, 1.0);
  kernels::gemm_nn(3, 5, 4, a.data().data(), b.data().data(), c.data());
  for (std::size_t i = 0; i < 15; ++i) EXPECT_NEAR(c[i], expect.data()[i] + 1.0, 1e-13);

  const Matrix bt = b.transposed();
  std::fill(c.begin(), c.end(), 0.0);
  kernels::gemm_nt(3, 5, 4, a.data().data(), bt.data().data(), c.data());
  EXPECT_LT(max_abs_diff(c, expect.data()), 1e-13);

  const Matrix at = a.transposed();
  std::fill(c.begin(), c.end(), 0.0);
  kernels::gemm_tn(3, 5, 4, at.data().data(), b.data().data(), c.data());
  EXPECT_LT(max_abs_diff(c, expect.data()), 1e-13);
}

TEST(Linalg, EighReconstructsAndOrders) {
  std::mt19937_64 rng(8);
  const Matrix g = random_matrix(6, 6, rng);
  Matrix s = matmul_nt(g, g);
  const auto e = linalg::eigh(s);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  Matrix rebuilt(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t k = 0; k < 6; ++k) rebuilt(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
  EXPECT_LT(max_abs_diff(rebuilt.data(), s.data()), 1e-10);
  const Matrix gram = matmul_tn(e.vectors, e.vectors);
  EXPECT_LT(max_abs_diff(gram.data(), Matrix::identity(6).data()), 1e-12);
}

TEST(Linalg, OrthonormalizeAndPinv) {
  std::mt19937_64 rng(9);
  const Matrix q = linalg::orthonormalize(random_matrix(7, 3, rng));
  ASSERT_EQ(q.rows(), 7u);
  ASSERT_EQ(q.cols(), 3u);
  EXPECT_LT(max_abs_diff(matmul_tn(q, q).data(), Matrix::identity(3).data()), 1e-12);

  // Rank-2 PSD matrix: P·P⁺·P = P.
  const Matrix f = random_matrix(4, 2, rng);
  const Matrix p = matmul_nt(f, f);
  const Matrix pp = linalg::pinv_psd(p);
  EXPECT_LT(max_abs_diff(matmul(matmul(p, pp), p).data(), p.data()), 1e-10);
}

TEST(Tnsr, RoundTripBothDtypes) {
  std::mt19937_64 rng(10);
  DenseTensor t = random_tensor({2, 3, 1, 4}, rng);
  std::stringstream ss;
  write_tnsr(ss, t);
  EXPECT_EQ(read_tnsr(ss), t);

  t.set_dtype(DType::kFloat32);
  std::stringstream s32;
  write_tnsr(s32, t);
  const DenseTensor back = read_tnsr(s32);
  EXPECT_EQ(back.dtype(), DType::kFloat32);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back[i], static_cast<double>(static_cast<float>(t[i])));
}

TEST(Tnsr, HeaderLayout) {
  DenseTensor t({2}, {1.0, 2.0});
  std::stringstream ss;
  write_tnsr(ss, t);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 1u + 1u + 4u + 8u + 16u);
  EXPECT_EQ(bytes.substr(0, 4), "TNSR");
  EXPECT_EQ(bytes[4], '\x01');
  EXPECT_EQ(bytes[5], '\x00');
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[10]), 2u);
}

TEST(Tnsr, MalformedInputsAreRejected) {
  std::stringstream bad_magic("XNSR\x01\x00");
  EXPECT_THROW(read_tnsr(bad_magic), TnsrFormatError);

  DenseTensor t({3}, {1.0, 2.0, 3.0});
  std::stringstream ss;
  write_tnsr(ss, t);
  std::string bytes = ss.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_tnsr(truncated), TnsrFormatError);

  bytes[5] = '\x07';
  std::stringstream bad_dtype(bytes);
  EXPECT_THROW(read_tnsr(bad_dtype), TnsrFormatError);
  EXPECT_THROW(load_tnsr("/nonexistent/file.tnsr"), TnsrFormatError);
}
