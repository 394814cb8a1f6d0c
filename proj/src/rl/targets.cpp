#include "tenrl/rl/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tenrl/nn/network.hpp"

namespace tenrl::rl {

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::vector<double> double_q_targets(const DenseTensor& q_online_next, const DenseTensor& q_target_next,
                                     const std::vector<double>& rewards, const std::vector<double>& discounts,
                                     const std::vector<bool>& dones) {
  const std::size_t batch = rewards.size();
  if (q_online_next.shape() != q_target_next.shape() || q_online_next.extent(0) != batch) {
    throw std::invalid_argument("double_q_targets: q tensors must both be (B, A)");
  }
  const std::size_t actions = q_online_next.extent(1);
  std::vector<double> y(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    if (dones[i]) {
      y[i] = rewards[i];
      continue;
    }
    const auto a = argmax(q_online_next.data().subspan(i * actions, actions));
    y[i] = rewards[i] + discounts[i] * q_target_next[i * actions + a];
  }
  return y;
}

LossResult bellman_loss(const DenseTensor& q, const std::vector<int>& actions, const std::vector<double>& targets,
                        const std::vector<double>& weights, bool huber) {
  const std::size_t batch = targets.size();
  if (q.order() != 2 || q.extent(0) != batch || actions.size() != batch || weights.size() != batch) {
    throw std::invalid_argument("bellman_loss: batch sizes do not match");
  }
  const std::size_t n_actions = q.extent(1);
  LossResult r;
  r.grad = DenseTensor(q.shape());
  r.td_errors.resize(batch);
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t at = i * n_actions + static_cast<std::size_t>(actions[i]);
    const double d = targets[i] - q[at];
    r.td_errors[i] = std::abs(d);
    double l;
    double dl_dq;
    if (huber && std::abs(d) > 1.0) {
      l = std::abs(d) - 0.5;
      dl_dq = d > 0 ? -1.0 : 1.0;
    } else if (huber) {
      l = 0.5 * d * d;
      dl_dq = -d;
    } else {
      l = d * d;
      dl_dq = -2.0 * d;
    }
    r.loss += weights[i] * l * inv_b;
    r.grad[at] = weights[i] * dl_dq * inv_b;
  }
  return r;
}

std::vector<double> project_distribution(std::span<const double> probs, double reward, double discount,
                                         const std::vector<double>& support) {
  const std::size_t atoms = support.size();
  if (probs.size() != atoms || atoms < 2) throw std::invalid_argument("project_distribution: atom count mismatch");
  const double v_min = support.front();
  const double v_max = support.back();
  const double delta = (v_max - v_min) / static_cast<double>(atoms - 1);
  std::vector<double> m(atoms, 0.0);
  for (std::size_t j = 0; j < atoms; ++j) {
    const double tz = std::clamp(reward + discount * support[j], v_min, v_max);
    const double b = (tz - v_min) / delta;
    const double lo = std::floor(b);
    const double hi = std::ceil(b);
    const auto l = static_cast<std::size_t>(std::clamp(lo, 0.0, static_cast<double>(atoms - 1)));
    const auto u = static_cast<std::size_t>(std::clamp(hi, 0.0, static_cast<double>(atoms - 1)));
    if (l == u) {
      m[l] += probs[j];
    } else {
      m[l] += probs[j] * (hi - b);
      m[u] += probs[j] * (b - lo);
    }
  }
  return m;
}

LossResult distributional_loss(const DenseTensor& logits, const std::vector<int>& actions,
                               const std::vector<std::vector<double>>& targets, const std::vector<double>& weights) {
  const std::size_t batch = targets.size();
  if (logits.order() != 3 || logits.extent(0) != batch || actions.size() != batch || weights.size() != batch) {
    throw std::invalid_argument("distributional_loss: batch sizes do not match");
  }
  const std::size_t n_actions = logits.extent(1);
  const std::size_t atoms = logits.extent(2);
  const DenseTensor p = nn::softmax_last(logits);
  LossResult r;
  r.grad = DenseTensor(logits.shape());
  r.td_errors.resize(batch);
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t base = (i * n_actions + static_cast<std::size_t>(actions[i])) * atoms;
    // log p via log-sum-exp for accuracy when probabilities underflow
    double mx = logits[base];
    for (std::size_t z = 1; z < atoms; ++z) mx = std::max(mx, logits[base + z]);
    double lse = 0.0;
    for (std::size_t z = 0; z < atoms; ++z) lse += std::exp(logits[base + z] - mx);
    lse = mx + std::log(lse);
    double ce = 0.0;
    for (std::size_t z = 0; z < atoms; ++z) ce -= targets[i][z] * (logits[base + z] - lse);
    r.td_errors[i] = ce;
    r.loss += weights[i] * ce * inv_b;
    for (std::size_t z = 0; z < atoms; ++z) r.grad[base + z] = weights[i] * (p[base + z] - targets[i][z]) * inv_b;
  }
  return r;
}

}  // namespace tenrl::rl
