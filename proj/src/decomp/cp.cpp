#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tenrl/decomp.hpp"
#include "tenrl/linalg.hpp"

namespace tenrl::decomp {

Shape CPDecomposition::shape() const {
  Shape s;
  for (const auto& f : factors) s.push_back(f.rows());
  return s;
}

DenseTensor cp_reconstruct(const CPDecomposition& d) {
  if (d.factors.empty()) throw std::invalid_argument("cp_reconstruct: no factors");
  for (const auto& f : d.factors) {
    if (f.cols() != d.rank()) throw std::invalid_argument("cp_reconstruct: factor column count differs from rank");
  }
  DenseTensor x(d.shape());
  std::vector<std::vector<double>> columns(d.factors.size());
  for (std::size_t r = 0; r < d.rank(); ++r) {
    for (std::size_t k = 0; k < d.factors.size(); ++k) {
      columns[k].resize(d.factors[k].rows());
      for (std::size_t i = 0; i < d.factors[k].rows(); ++i) columns[k][i] = d.factors[k](i, r);
    }
    const auto term = outer_product(columns);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += d.weights[r] * term[i];
  }
  return x;
}

double relative_error(const DenseTensor& x, const DenseTensor& approx) {
  if (x.shape() != approx.shape()) throw std::invalid_argument("relative_error: shapes differ");
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - approx[i];
    diff += e * e;
    norm += x[i] * x[i];
  }
  if (norm == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / norm);
}

namespace {

// M(i_n, r) = Σ x(i) Π_{k≠n} U_k(i_k, r): matricized tensor times Khatri-Rao product.
Matrix mttkrp(const DenseTensor& x, const std::vector<Matrix>& factors, std::size_t mode, std::size_t rank) {
  const std::size_t order = x.order();
  Matrix m(x.extent(mode), rank);
  std::vector<std::size_t> idx(order, 0);
  std::vector<double> prod(rank);
  for (std::size_t flat = 0; flat < x.size(); ++flat) {
    const double v = x[flat];
    if (v != 0.0) {
      std::fill(prod.begin(), prod.end(), v);
      for (std::size_t k = 0; k < order; ++k) {
        if (k == mode) continue;
        const auto row = factors[k].row(idx[k]);
        for (std::size_t r = 0; r < rank; ++r) prod[r] *= row[r];
      }
      auto out = m.row(idx[mode]);
      for (std::size_t r = 0; r < rank; ++r) out[r] += prod[r];
    }
    for (std::size_t k = order; k-- > 0;) {
      if (++idx[k] < x.extent(k)) break;
      idx[k] = 0;
    }
  }
  return m;
}

// Moves column norms of `f` into `weights`; zero columns become e_0.
void normalize_columns(Matrix& f, std::vector<double>& weights) {
  for (std::size_t r = 0; r < f.cols(); ++r) {
    double norm = 0.0;
    for (std::size_t i = 0; i < f.rows(); ++i) norm += f(i, r) * f(i, r);
    norm = std::sqrt(norm);
    weights[r] = norm;
    if (norm > 0.0) {
      for (std::size_t i = 0; i < f.rows(); ++i) f(i, r) /= norm;
    } else {
      for (std::size_t i = 0; i < f.rows(); ++i) f(i, r) = i == 0 ? 1.0 : 0.0;
    }
  }
}

CPResult run_restart(const DenseTensor& x, std::size_t rank, const CPOptions& opts, std::mt19937_64& rng) {
  const std::size_t order = x.order();
  CPResult res;
  auto& d = res.decomposition;
  d.weights.assign(rank, 1.0);
  for (std::size_t k = 0; k < order; ++k) {
    Matrix f = linalg::gaussian_matrix(x.extent(k), rank, rng);
    std::vector<double> unused(rank);
    normalize_columns(f, unused);
    d.factors.push_back(std::move(f));
  }

  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const CPDecomposition before = d;
    for (std::size_t n = 0; n < order; ++n) {
      Matrix gram(rank, rank, 1.0);
      for (std::size_t k = 0; k < order; ++k) {
        if (k == n) continue;
        const Matrix g = matmul_tn(d.factors[k], d.factors[k]);
        for (std::size_t i = 0; i < gram.size(); ++i) gram.data()[i] *= g.data()[i];
      }
      Matrix updated = matmul(mttkrp(x, d.factors, n, rank), linalg::pinv_psd(gram));
      normalize_columns(updated, d.weights);
      d.factors[n] = std::move(updated);
    }
    double err = relative_error(x, cp_reconstruct(d));

    // Extrapolate along the last sweep's step; keep it only if the fit improves.
    if (iter >= 2) {
      const double step = std::cbrt(static_cast<double>(iter + 1));
      CPDecomposition trial = d;
      for (std::size_t r = 0; r < rank; ++r) {
        trial.weights[r] = d.weights[r] + step * (d.weights[r] - before.weights[r]);
      }
      for (std::size_t k = 0; k < order; ++k) {
        auto& f = trial.factors[k];
        for (std::size_t i = 0; i < f.size(); ++i) {
          f.data()[i] += step * (d.factors[k].data()[i] - before.factors[k].data()[i]);
        }
        std::vector<double> norms(rank);
        normalize_columns(f, norms);
        for (std::size_t r = 0; r < rank; ++r) trial.weights[r] *= norms[r];
      }
      const double trial_err = relative_error(x, cp_reconstruct(trial));
      if (trial_err < err) {
        d = std::move(trial);
        err = trial_err;
      }
    }

    res.error_history.push_back(err);
    res.rel_error = err;
    if (err < 1e-15 || std::abs(prev - err) < opts.tol) break;
    prev = err;
  }
  return res;
}

}  // namespace

CPResult cp_als(const DenseTensor& x, std::size_t rank, const CPOptions& opts) {
  if (rank < 1) throw std::invalid_argument("cp_als: rank must be at least 1");
  if (x.order() < 2) throw std::invalid_argument("cp_als: tensor needs at least two modes");
  if (opts.restarts < 1) throw std::invalid_argument("cp_als: restarts must be at least 1");

  if (frobenius_norm(x.data()) == 0.0) {
    CPResult zero;
    zero.decomposition.weights.assign(rank, 0.0);
    for (std::size_t k = 0; k < x.order(); ++k) {
      Matrix f(x.extent(k), rank);
      for (std::size_t r = 0; r < rank; ++r) f(0, r) = 1.0;
      zero.decomposition.factors.push_back(std::move(f));
    }
    zero.rel_error = 0.0;
    return zero;
  }

  std::mt19937_64 rng(opts.seed);
  CPResult best;
  best.rel_error = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < opts.restarts; ++restart) {
    auto candidate = run_restart(x, rank, opts, rng);
    if (candidate.rel_error < best.rel_error) best = std::move(candidate);
  }
  return best;
}

std::size_t cp_param_count(const Shape& shape, std::size_t rank) {
  std::size_t s = 1;
  for (auto e : shape) s += e;
  return rank * s;
}

std::size_t param_count(const CPDecomposition& d) { return cp_param_count(d.shape(), d.rank()); }

}  // namespace tenrl::decomp
