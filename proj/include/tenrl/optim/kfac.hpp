#pragma once

#include <cstddef>

#include "tenrl/tensor.hpp"

namespace tenrl::optim {

struct KfacConfig {
  double lr = 1e-3;
  double damping = 0.1;            // λ_d
  double stat_decay = 0.95;        // ρ_s
  std::size_t inverse_period = 100;
  double max_update_norm = 0.0;    // 0 disables the per-step norm cap

  void validate() const;
};

/// Kronecker factors A (input side) and B (output-gradient side) of one
/// linear map W (out × in), with their damped inverses.
///
/// With bias the map is treated as W̃ = [W | b] acting on [a; 1], so A has
/// dimension in + 1 and gradients passed to precondition() are (out × in+1).
class KfacLayerState {
 public:
  KfacLayerState(std::size_t in, std::size_t out, bool bias, KfacConfig cfg = {});

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  bool has_bias() const { return bias_; }

  /// a is (n × in), g is (n × out); rows are samples (or fibers). The first
  /// call stores the batch moments directly, later calls decay toward them.
  void accumulate(const Matrix& a, const Matrix& g);
  /// Overrides the statistics, e.g. with exact factors.
  void set_statistics(Matrix a_cov, Matrix b_cov);

  /// Recomputes π and the damped inverses. Throws NumericalError when a
  /// damped factor is singular.
  void refresh_inverses();

  /// B⁻¹·G·A⁻¹ for G of shape (out × dim_a). Refreshes inverses first when
  /// none exist yet or the refresh period has elapsed.
  Matrix precondition(const Matrix& grad);

  const Matrix& a_cov() const { return a_cov_; }
  const Matrix& b_cov() const { return b_cov_; }
  const Matrix& a_inv() const { return a_inv_; }
  const Matrix& b_inv() const { return b_inv_; }
  double pi() const { return pi_; }
  std::size_t updates() const { return updates_; }
  std::size_t steps_since_inverse() const { return since_inverse_; }
  const KfacConfig& config() const { return cfg_; }

 private:
  KfacConfig cfg_;
  std::size_t in_;
  std::size_t dim_a_;
  std::size_t dim_b_;
  bool bias_;
  Matrix a_cov_;
  Matrix b_cov_;
  Matrix a_inv_;
  Matrix b_inv_;
  double pi_ = 1.0;
  std::size_t updates_ = 0;
  std::size_t since_inverse_ = 0;
  bool have_inverses_ = false;
};

}  // namespace tenrl::optim
