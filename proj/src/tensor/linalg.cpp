#include "tenrl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tenrl::linalg {

namespace {

void sign_normalize(Matrix& v, std::size_t col) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t r = 0; r < v.rows(); ++r) {
    const double a = std::abs(v(r, col));
    if (a > best_abs + 1e-12) {
      best_abs = a;
      best = r;
    }
  }
  if (v(best, col) < 0.0) {
    for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) = -v(r, col);
  }
}

}  // namespace

SymmetricEigen eigh(const Matrix& input, double tol, int max_sweeps) {
  if (input.rows() != input.cols()) throw std::invalid_argument("eigh needs a square matrix");
  const std::size_t n = input.rows();
  Matrix a = input;
  symmetrize(a);
  Matrix v = Matrix::identity(n);

  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double threshold = tol * tol * std::max(total, 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= threshold) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    sign_normalize(out.vectors, k);
  }
  return out;
}

Matrix leading_eigenvectors(const Matrix& a, std::size_t k) {
  if (k == 0 || k > a.rows()) throw std::invalid_argument("leading_eigenvectors: k out of range");
  const auto e = eigh(a);
  Matrix u(a.rows(), k);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < k; ++c) u(r, c) = e.vectors(r, c);
  return u;
}

Matrix orthonormalize(const Matrix& a) {
  // Householder QR, Q accumulated explicitly.
  const std::size_t m = a.rows();
  const std::size_t n = std::min(a.rows(), a.cols());
  Matrix r = a;
  std::vector<std::vector<double>> reflectors;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(m, 0.0);
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += r(i, k) * r(i, k);
    norm = std::sqrt(norm);
    const double alpha = r(k, k) > 0 ? -norm : norm;
    for (std::size_t i = k; i < m; ++i) v[i] = r(i, k);
    v[k] -= alpha;
    double vnorm = 0.0;
    for (std::size_t i = k; i < m; ++i) vnorm += v[i] * v[i];
    if (vnorm > 0.0) {
      for (std::size_t c = k; c < r.cols(); ++c) {
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i] * r(i, c);
        const double f = 2.0 * dot / vnorm;
        for (std::size_t i = k; i < m; ++i) r(i, c) -= f * v[i];
      }
    }
    reflectors.push_back(std::move(v));
  }
  Matrix q(m, n);
  for (std::size_t c = 0; c < n; ++c) q(c, c) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const auto& v = reflectors[k];
    double vnorm = 0.0;
    for (std::size_t i = k; i < m; ++i) vnorm += v[i] * v[i];
    if (vnorm == 0.0) continue;
    for (std::size_t c = 0; c < n; ++c) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i] * q(i, c);
      const double f = 2.0 * dot / vnorm;
      for (std::size_t i = k; i < m; ++i) q(i, c) -= f * v[i];
    }
  }
  // Make the diagonal of R positive so Q is unique.
  for (std::size_t c = 0; c < n; ++c) {
    if (r(c, c) < 0.0)
      for (std::size_t i = 0; i < m; ++i) q(i, c) = -q(i, c);
  }
  return q;
}

Matrix pinv_psd(const Matrix& a, double rel_tol) {
  const auto e = eigh(a);
  const std::size_t n = a.rows();
  const double cutoff = rel_tol * std::max(e.values.empty() ? 0.0 : e.values.front(), 0.0);
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (e.values[k] <= cutoff || e.values[k] <= 0.0) continue;
    const double inv = 1.0 / e.values[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = e.vectors(i, k) * inv;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * e.vectors(j, k);
    }
  }
  return out;
}

void symmetrize(Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = normal(rng);
  return m;
}

}  // namespace tenrl::linalg
