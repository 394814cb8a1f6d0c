#include "tenrl/optim/bench.hpp"

#include <cmath>
#include <random>

#include "tenrl/linalg.hpp"
#include "tenrl/nn/tape.hpp"
#include "tenrl/optim/adam.hpp"
#include "tenrl/optim/kfac.hpp"

namespace tenrl::optim {

namespace {

Matrix spd_with_spectrum(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  const Matrix q = linalg::orthonormalize(linalg::gaussian_matrix(n, n, rng));
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    const double eig = lo * std::pow(hi / lo, t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += eig * q(i, k) * q(j, k);
  }
  linalg::symmetrize(out);
  return out;
}

Matrix diff(const Matrix& x, const Matrix& y) {
  Matrix d = x;
  for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] -= y.data()[i];
  return d;
}

}  // namespace

KroneckerQuadratic KroneckerQuadratic::random(std::size_t dim_a, std::size_t dim_b, std::uint64_t seed, double min_eig,
                                              double max_eig) {
  std::mt19937_64 rng(seed);
  KroneckerQuadratic q;
  q.a = spd_with_spectrum(dim_a, min_eig, max_eig, rng);
  q.b = spd_with_spectrum(dim_b, min_eig, max_eig, rng);
  q.target = linalg::gaussian_matrix(dim_b, dim_a, rng);
  return q;
}

double KroneckerQuadratic::loss(const Matrix& w) const {
  const Matrix d = diff(w, target);
  const Matrix bda = matmul(matmul(b, d), a);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d.data()[i] * bda.data()[i];
  return 0.5 * s;
}

Matrix KroneckerQuadratic::gradient(const Matrix& w) const { return matmul(matmul(b, diff(w, target)), a); }

std::vector<BenchRow> run_optimizer_bench(const BenchOptions& opts) {
  const auto problem = KroneckerQuadratic::random(opts.dim_a, opts.dim_b, opts.seed);
  Matrix w_sgd(opts.dim_b, opts.dim_a);
  nn::Parameter w_adam("w", DenseTensor({opts.dim_b, opts.dim_a}), 0);
  Matrix w_kfac(opts.dim_b, opts.dim_a);

  Adam adam(AdamConfig{opts.adam_lr, 0.9, 0.999, 1e-8});
  KfacConfig kcfg;
  kcfg.lr = opts.lr;
  kcfg.damping = opts.damping;
  KfacLayerState kfac(opts.dim_a, opts.dim_b, false, kcfg);
  kfac.set_statistics(problem.a, problem.b);

  auto adam_matrix = [&] { return Matrix(opts.dim_b, opts.dim_a, w_adam.value.values()); };
  std::vector<BenchRow> rows;
  rows.push_back({0, problem.loss(w_sgd), problem.loss(adam_matrix()), problem.loss(w_kfac)});
  for (std::size_t t = 1; t <= opts.steps; ++t) {
    const Matrix g = problem.gradient(w_sgd);
    for (std::size_t i = 0; i < g.size(); ++i) w_sgd.data()[i] -= opts.lr * g.data()[i];

    const Matrix ga = problem.gradient(adam_matrix());
    w_adam.grad = DenseTensor({opts.dim_b, opts.dim_a}, std::vector<double>(ga.data().begin(), ga.data().end()));
    adam.step({&w_adam});

    const Matrix step = kfac.precondition(problem.gradient(w_kfac));
    for (std::size_t i = 0; i < step.size(); ++i) w_kfac.data()[i] -= opts.lr * step.data()[i];

    rows.push_back({t, problem.loss(w_sgd), problem.loss(adam_matrix()), problem.loss(w_kfac)});
  }
  return rows;
}

}  // namespace tenrl::optim
