#include "tenrl/optim/kfac.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tenrl/errors.hpp"
#include "tenrl/linalg.hpp"

namespace tenrl::optim {

void KfacConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("optim.kfac.lr", "must be positive");
  if (!(damping >= 0.0)) throw ConfigError("optim.kfac.damping", "must be non-negative");
  if (!(stat_decay >= 0.0 && stat_decay < 1.0)) throw ConfigError("optim.kfac.stat_decay", "must lie in [0, 1)");
  if (inverse_period == 0) throw ConfigError("optim.kfac.inverse_period", "must be positive");
  if (!(max_update_norm >= 0.0)) throw ConfigError("optim.kfac.max_update_norm", "must be non-negative");
}

KfacLayerState::KfacLayerState(std::size_t in, std::size_t out, bool bias, KfacConfig cfg)
    : cfg_(cfg),
      in_(in),
      dim_a_(in + (bias ? 1 : 0)),
      dim_b_(out),
      bias_(bias),
      a_cov_(dim_a_, dim_a_),
      b_cov_(dim_b_, dim_b_) {
  cfg_.validate();
}

namespace {

void decay_into(Matrix& cov, const Matrix& batch, double rho, bool first) {
  for (std::size_t i = 0; i < cov.size(); ++i) {
    cov.data()[i] = first ? batch.data()[i] : rho * cov.data()[i] + (1.0 - rho) * batch.data()[i];
  }
  linalg::symmetrize(cov);
}

Matrix damped_inverse(const Matrix& cov, double shift, const char* which) {
  const auto eig = linalg::eigh(cov);
  const std::size_t n = cov.rows();
  std::vector<double> inv(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::max(eig.values[k], 0.0) + shift;
    if (d < 1e-10) {
      throw NumericalError(std::string("K-FAC factor ") + which + " is singular after damping (eigenvalue " +
                           std::to_string(eig.values[k]) + ")");
    }
    inv[k] = 1.0 / d;
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * inv[k] * eig.vectors(j, k);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

void KfacLayerState::accumulate(const Matrix& a, const Matrix& g) {
  if (a.cols() != in_ || g.cols() != dim_b_ || a.rows() != g.rows() || a.rows() == 0) {
    throw std::invalid_argument("kfac accumulate: expected a (n × " + std::to_string(in_) + ") and g (n × " +
                                std::to_string(dim_b_) + ")");
  }
  const std::size_t n = a.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix ea(dim_a_, dim_a_);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < in_; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = 0; j < in_; ++j) ea(i, j) += row[i] * row[j];
    }
    if (bias_) {
      for (std::size_t i = 0; i < in_; ++i) {
        ea(i, in_) += row[i];
        ea(in_, i) += row[i];
      }
      ea(in_, in_) += 1.0;
    }
  }
  Matrix eg(dim_b_, dim_b_);
  kernels::gemm_tn(dim_b_, dim_b_, n, g.data().data(), g.data().data(), eg.data().data());
  for (auto& v : ea.data()) v *= inv_n;
  for (auto& v : eg.data()) v *= inv_n;
  const bool first = updates_ == 0;
  decay_into(a_cov_, ea, cfg_.stat_decay, first);
  decay_into(b_cov_, eg, cfg_.stat_decay, first);
  ++updates_;
}

void KfacLayerState::set_statistics(Matrix a_cov, Matrix b_cov) {
  if (a_cov.rows() != dim_a_ || a_cov.cols() != dim_a_ || b_cov.rows() != dim_b_ || b_cov.cols() != dim_b_) {
    throw std::invalid_argument("kfac set_statistics: factor dimensions do not match the layer");
  }
  a_cov_ = std::move(a_cov);
  b_cov_ = std::move(b_cov);
  ++updates_;
  have_inverses_ = false;
}

void KfacLayerState::refresh_inverses() {
  double tr_a = 0.0;
  double tr_b = 0.0;
  for (std::size_t i = 0; i < dim_a_; ++i) tr_a += a_cov_(i, i);
  for (std::size_t i = 0; i < dim_b_; ++i) tr_b += b_cov_(i, i);
  tr_a /= static_cast<double>(dim_a_);
  tr_b /= static_cast<double>(dim_b_);
  pi_ = (tr_a > 0.0 && tr_b > 0.0) ? std::sqrt(tr_a / tr_b) : 1.0;
  const double root = std::sqrt(cfg_.damping);
  a_inv_ = damped_inverse(a_cov_, pi_ * root, "A");
  b_inv_ = damped_inverse(b_cov_, root / pi_, "B");
  have_inverses_ = true;
  since_inverse_ = 0;
}

Matrix KfacLayerState::precondition(const Matrix& grad) {
  if (grad.rows() != dim_b_ || grad.cols() != dim_a_) {
    throw std::invalid_argument("kfac precondition: gradient must be (" + std::to_string(dim_b_) + " × " +
                                std::to_string(dim_a_) + ")");
  }
  if (!have_inverses_ || since_inverse_ >= cfg_.inverse_period) refresh_inverses();
  ++since_inverse_;
  return matmul(matmul(b_inv_, grad), a_inv_);
}

}  // namespace tenrl::optim
