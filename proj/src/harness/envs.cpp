#include "tenrl/harness/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tenrl::harness {

CatchEnv::CatchEnv(std::size_t grid, std::size_t frame_stack, std::uint64_t seed)
    : grid_(grid), frames_(frame_stack), rng_(seed) {
  if (grid < 3) throw std::invalid_argument("CatchEnv: grid must be at least 3");
  if (frame_stack == 0) throw std::invalid_argument("CatchEnv: frame_stack must be positive");
}

std::vector<double> CatchEnv::frame() const {
  std::vector<double> f(grid_ * grid_, 0.0);
  f[ball_row_ * grid_ + ball_col_] = 1.0;
  f[(grid_ - 1) * grid_ + paddle_] = 1.0;
  return f;
}

DenseTensor CatchEnv::observation() const {
  DenseTensor obs({frames_, grid_, grid_});
  for (std::size_t k = 0; k < frames_; ++k) std::copy(history_[k].begin(), history_[k].end(), obs.data().begin() + k * grid_ * grid_);
  return obs;
}

DenseTensor CatchEnv::reset() {
  std::uniform_int_distribution<std::size_t> col(0, grid_ - 1);
  ball_col_ = col(rng_);
  ball_row_ = 0;
  paddle_ = grid_ / 2;
  t_ = 0;
  history_.assign(frames_, frame());
  return observation();
}

EnvStep CatchEnv::step(int action) {
  if (action < 0 || action > 2) throw std::invalid_argument("CatchEnv: action must be 0, 1 or 2");
  if (t_ >= grid_ - 1) throw std::logic_error("CatchEnv: step after episode end");
  if (action == 0 && paddle_ > 0) --paddle_;
  if (action == 2 && paddle_ + 1 < grid_) ++paddle_;
  ++ball_row_;
  ++t_;
  history_.erase(history_.begin());
  history_.push_back(frame());
  EnvStep s;
  s.observation = observation();
  s.step = t_;
  if (t_ == grid_ - 1) {
    s.done = true;
    s.reward = paddle_ == ball_col_ ? 1.0 : -1.0;
  }
  return s;
}

int catch_optimal_action(const CatchEnv& env) {
  if (env.paddle() < env.ball_col()) return 2;
  if (env.paddle() > env.ball_col()) return 0;
  return 1;
}

MonteCarloEstimate catch_random_baseline(std::size_t grid, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw std::invalid_argument("catch_random_baseline: episodes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> col(0, grid - 1);
  std::uniform_int_distribution<int> act(0, 2);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    const std::size_t ball = col(rng);
    long paddle = static_cast<long>(grid / 2);
    for (std::size_t t = 0; t + 1 < grid; ++t) {
      paddle = std::clamp<long>(paddle + act(rng) - 1, 0, static_cast<long>(grid) - 1);
    }
    const double r = static_cast<std::size_t>(paddle) == ball ? 1.0 : -1.0;
    sum += r;
    sq += r * r;
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  const double var = std::max(0.0, sq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

ChainMdp::ChainMdp(std::size_t states, std::size_t max_steps) : states_(states), max_steps_(max_steps) {
  if (states < 2) throw std::invalid_argument("ChainMdp: needs at least 2 states");
  if (max_steps == 0) throw std::invalid_argument("ChainMdp: max_steps must be positive");
}

DenseTensor ChainMdp::one_hot(std::size_t s) const {
  DenseTensor x({states_});
  x[s] = 1.0;
  return x;
}

ChainMdp::Outcome ChainMdp::model(std::size_t s, int action) const {
  if (action != 0 && action != 1) throw std::invalid_argument("ChainMdp: action must be 0 or 1");
  const std::size_t next = action == 1 ? s + 1 : (s == 0 ? 0 : s - 1);
  const bool goal = next == states_ - 1;
  return {next, goal ? 1.0 : 0.0, goal};
}

DenseTensor ChainMdp::reset() {
  state_ = 0;
  t_ = 0;
  return one_hot(state_);
}

EnvStep ChainMdp::step(int action) {
  const auto o = model(state_, action);
  state_ = o.next;
  ++t_;
  EnvStep s;
  s.observation = one_hot(state_);
  s.reward = o.reward;
  s.done = o.terminal;
  s.truncated = !o.terminal && t_ >= max_steps_;
  s.step = t_;
  return s;
}

std::vector<std::vector<double>> value_iteration(const ChainMdp& mdp, double gamma, double tol) {
  const std::size_t n = mdp.states();
  std::vector<std::vector<double>> q(n, std::vector<double>(2, 0.0));
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    auto next_q = q;
    for (std::size_t s = 0; s + 1 < n; ++s) {
      for (int a = 0; a < 2; ++a) {
        const auto o = mdp.model(s, a);
        const double v = o.terminal ? 0.0 : std::max(q[o.next][0], q[o.next][1]);
        next_q[s][a] = o.reward + gamma * v;
        change = std::max(change, std::abs(next_q[s][a] - q[s][a]));
      }
    }
    q = std::move(next_q);
    if (change < tol) break;
  }
  return q;
}

}  // namespace tenrl::harness
