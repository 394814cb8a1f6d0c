#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "tenrl/nn/network.hpp"
#include "tenrl/optim/optimizer.hpp"
#include "tenrl/rl/replay.hpp"

namespace tenrl::rl {

struct AgentConfig {
  double gamma = 0.99;
  std::size_t n_step = 20;
  std::size_t batch_size = 32;
  std::size_t target_period = 2000;  // in learning updates
  std::size_t min_replay = 1600;
  std::size_t replay_capacity = 100000;
  std::size_t update_period = 1;     // environment steps per learning update
  double alpha = 0.5;
  double beta_start = 0.4;
  double beta_end = 1.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  double epsilon_fraction = 0.1;     // share of training over which ε decays
  double eval_epsilon = 0.001;
  bool huber = false;

  void validate() const;
};

struct LearnStats {
  double loss = 0.0;
  double grad_norm = 0.0;
};

/// Prioritized double DQN with optional dueling and distributional heads.
class Agent {
 public:
  Agent(nn::NetworkSpec spec, AgentConfig cfg, optim::OptimConfig optim, std::uint64_t seed);

  const AgentConfig& config() const { return cfg_; }
  nn::Network& online() { return *online_; }
  nn::Network& target() { return *target_; }
  PrioritizedReplay& replay() { return replay_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t updates() const { return updates_; }

  /// Observation (C, H, W) → flattened per-sample network input.
  std::vector<float> featurize(const DenseTensor& observation) const;

  /// ε-greedy; greedy ties go to the lowest action index.
  int act(const std::vector<float>& features, double epsilon);
  /// Greedy action values for one preprocessed sample.
  std::vector<double> q_values(const std::vector<float>& features);

  double epsilon_at(std::size_t step, std::size_t total_steps) const;
  double beta_at(std::size_t step, std::size_t total_steps) const;

  /// Feeds one environment step through the n-step accumulator into replay.
  void observe(const std::vector<float>& state, int action, double reward, const std::vector<float>& next_state,
               bool terminal, bool truncated);

  bool ready() const { return replay_.size() >= cfg_.min_replay && replay_.size() >= cfg_.batch_size; }
  /// One prioritized minibatch update; syncs the target every target_period updates.
  LearnStats learn(double beta);

  void sync_target();

 private:
  DenseTensor stack(const std::vector<const std::vector<float>*>& rows) const;

  AgentConfig cfg_;
  std::unique_ptr<nn::Network> online_;
  std::unique_ptr<nn::Network> target_;
  std::unique_ptr<optim::Optimizer> optimizer_;
  PrioritizedReplay replay_;
  NStepAccumulator nstep_;
  std::mt19937_64 rng_;
  std::size_t updates_ = 0;
};

}  // namespace tenrl::rl
