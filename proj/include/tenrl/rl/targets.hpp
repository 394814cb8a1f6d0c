#pragma once

#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::rl {

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// y_i = r_i + discount_i · q_target(s', argmax_a q_online(s', a)), or r_i when done.
/// q tensors are (B, A).
std::vector<double> double_q_targets(const DenseTensor& q_online_next, const DenseTensor& q_target_next,
                                     const std::vector<double>& rewards, const std::vector<double>& discounts,
                                     const std::vector<bool>& dones);

struct LossResult {
  double loss = 0.0;
  std::vector<double> td_errors;  // priority signal per sample
  DenseTensor grad;               // d loss / d network output
};

/// loss = mean_i w_i·(y_i − q_i)² over the taken actions, or the clamped
/// quadratic (Huber, δ = 1) when `huber`. q is (B, A); grad has the same shape.
LossResult bellman_loss(const DenseTensor& q, const std::vector<int>& actions, const std::vector<double>& targets,
                        const std::vector<double>& weights, bool huber = false);

/// Maps each atom z_j to clamp(r + discount·z_j, v_min, v_max) and splits its
/// mass between the two neighbouring atoms.
std::vector<double> project_distribution(std::span<const double> probs, double reward, double discount,
                                         const std::vector<double>& support);

/// IS-weighted cross-entropy between projected targets (B, atoms) and the
/// softmax of `logits` (B, A, atoms) at the taken actions. td_errors hold the
/// per-sample cross-entropies; grad is w.r.t. the logits.
LossResult distributional_loss(const DenseTensor& logits, const std::vector<int>& actions,
                               const std::vector<std::vector<double>>& targets, const std::vector<double>& weights);

}  // namespace tenrl::rl
