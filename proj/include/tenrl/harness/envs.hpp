#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::harness {

struct EnvStep {
  DenseTensor observation;
  double reward = 0.0;
  bool done = false;       // terminal: no bootstrap
  bool truncated = false;  // time limit: episode ends but bootstrap remains valid
  std::size_t step = 0;    // steps taken in the current episode
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual DenseTensor reset() = 0;
  virtual EnvStep step(int action) = 0;
  virtual std::size_t num_actions() const = 0;
  virtual Shape observation_shape() const = 0;
};

/// Ball falls straight down from a random top-row column; the paddle moves
/// along the bottom row. Actions: 0 left, 1 stay, 2 right. After G−1 steps the
/// ball reaches the paddle row and the episode ends with ±1.
class CatchEnv : public Environment {
 public:
  CatchEnv(std::size_t grid, std::size_t frame_stack, std::uint64_t seed);

  DenseTensor reset() override;
  EnvStep step(int action) override;
  std::size_t num_actions() const override { return 3; }
  Shape observation_shape() const override { return {frames_, grid_, grid_}; }

  std::size_t ball_row() const { return ball_row_; }
  std::size_t ball_col() const { return ball_col_; }
  std::size_t paddle() const { return paddle_; }
  std::size_t grid() const { return grid_; }

 private:
  DenseTensor observation() const;
  std::vector<double> frame() const;

  std::size_t grid_;
  std::size_t frames_;
  std::mt19937_64 rng_;
  std::size_t ball_row_ = 0;
  std::size_t ball_col_ = 0;
  std::size_t paddle_ = 0;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> history_;
};

/// K states in a line, start at the left end. Actions: 0 left, 1 right.
/// Entering the rightmost state pays 1 and terminates; episodes longer than
/// `max_steps` are truncated.
class ChainMdp : public Environment {
 public:
  ChainMdp(std::size_t states, std::size_t max_steps);

  DenseTensor reset() override;
  EnvStep step(int action) override;
  std::size_t num_actions() const override { return 2; }
  Shape observation_shape() const override { return {states_}; }

  std::size_t states() const { return states_; }
  std::size_t state() const { return state_; }
  /// Deterministic model: (next state, reward, terminal) for any state/action.
  struct Outcome {
    std::size_t next;
    double reward;
    bool terminal;
  };
  Outcome model(std::size_t s, int action) const;
  DenseTensor one_hot(std::size_t s) const;

 private:
  std::size_t states_;
  std::size_t max_steps_;
  std::size_t state_ = 0;
  std::size_t t_ = 0;
};

/// q[s][a] of the chain under discount γ, iterated until the sup-norm change
/// drops below `tol`. The terminal state's row stays zero.
std::vector<std::vector<double>> value_iteration(const ChainMdp& mdp, double gamma, double tol = 1e-12);

/// Monte-Carlo mean and standard error of the uniformly random Catch policy.
struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MonteCarloEstimate catch_random_baseline(std::size_t grid, std::size_t episodes, std::uint64_t seed);

/// Always moves the paddle toward the ball column.
int catch_optimal_action(const CatchEnv& env);

}  // namespace tenrl::harness
