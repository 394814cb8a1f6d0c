#include "tenrl/rl/agent.hpp"

#include <algorithm>
#include <cmath>

#include "tenrl/errors.hpp"
#include "tenrl/rl/targets.hpp"

namespace tenrl::rl {

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma", "must lie in [0, 1]");
  if (n_step == 0) throw ConfigError("agent.n_step", "must be positive");
  if (batch_size == 0) throw ConfigError("agent.batch_size", "must be positive");
  if (batch_size > min_replay) throw ConfigError("agent.batch_size", "must not exceed agent.min_replay");
  if (replay_capacity < min_replay) throw ConfigError("agent.replay_capacity", "must be at least agent.min_replay");
  if (target_period == 0) throw ConfigError("agent.target_period", "must be positive");
  if (update_period == 0) throw ConfigError("agent.update_period", "must be positive");
  if (alpha < 0.0) throw ConfigError("agent.alpha", "must be non-negative");
  if (!(epsilon_fraction > 0.0 && epsilon_fraction <= 1.0)) {
    throw ConfigError("agent.epsilon_fraction", "must lie in (0, 1]");
  }
  for (auto [name, v] : {std::pair{"epsilon_start", epsilon_start}, {"epsilon_end", epsilon_end},
                         {"eval_epsilon", eval_epsilon}, {"beta_start", beta_start}, {"beta_end", beta_end}}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("agent.") + name, "must lie in [0, 1]");
  }
}

namespace {

AgentConfig checked(AgentConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Agent::Agent(nn::NetworkSpec spec, AgentConfig cfg, optim::OptimConfig optim, std::uint64_t seed)
    : cfg_(checked(cfg)), replay_(cfg_.replay_capacity, cfg_.alpha), nstep_(cfg_.n_step, cfg_.gamma) {
  std::seed_seq seq{seed, std::uint64_t{0x7e41}};
  std::uint64_t seeds[2];
  std::mt19937_64 splitter(seq);
  seeds[0] = splitter();
  seeds[1] = splitter();
  online_ = std::make_unique<nn::Network>(spec, seeds[0]);
  target_ = std::make_unique<nn::Network>(spec, seeds[0]);
  target_->copy_parameters_from(*online_);
  optimizer_ = std::make_unique<optim::Optimizer>(*online_, optim);
  rng_.seed(seeds[1]);
}

std::vector<float> Agent::featurize(const DenseTensor& observation) const {
  Shape batched{1};
  batched.insert(batched.end(), observation.shape().begin(), observation.shape().end());
  const DenseTensor f = online_->preprocess(observation.reshaped(batched));
  return std::vector<float>(f.data().begin(), f.data().end());
}

DenseTensor Agent::stack(const std::vector<const std::vector<float>*>& rows) const {
  const Shape per = online_->feature_input_shape();
  const std::size_t n = shape_size(per);
  Shape batched{rows.size()};
  batched.insert(batched.end(), per.begin(), per.end());
  DenseTensor out(batched);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]->size() != n) throw std::invalid_argument("agent: stored features do not match the network input");
    std::copy(rows[i]->begin(), rows[i]->end(), out.data().begin() + i * n);
  }
  return out;
}

std::vector<double> Agent::q_values(const std::vector<float>& features) {
  const DenseTensor q = online_->q_values(stack({&features}));
  return q.values();
}

int Agent::act(const std::vector<float>& features, double epsilon) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto actions = online_->spec().head.actions;
  if (unit(rng_) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(actions) - 1);
    return pick(rng_);
  }
  const auto q = q_values(features);
  return static_cast<int>(argmax(q));
}

double Agent::epsilon_at(std::size_t step, std::size_t total_steps) const {
  const double horizon = std::max(1.0, cfg_.epsilon_fraction * static_cast<double>(total_steps));
  const double frac = std::min(1.0, static_cast<double>(step) / horizon);
  return (1.0 - frac) * cfg_.epsilon_start + frac * cfg_.epsilon_end;
}

double Agent::beta_at(std::size_t step, std::size_t total_steps) const {
  const double frac = total_steps == 0 ? 1.0 : std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return (1.0 - frac) * cfg_.beta_start + frac * cfg_.beta_end;
}

void Agent::observe(const std::vector<float>& state, int action, double reward, const std::vector<float>& next_state,
                    bool terminal, bool truncated) {
  for (auto& t : nstep_.push(state, action, reward, next_state, terminal, truncated)) replay_.push(std::move(t));
}

LearnStats Agent::learn(double beta) {
  const auto batch = replay_.sample(cfg_.batch_size, beta, rng_);
  const std::size_t b = batch.transitions.size();
  std::vector<const std::vector<float>*> states;
  std::vector<const std::vector<float>*> next_states;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> discounts;
  std::vector<bool> dones;
  for (const auto* t : batch.transitions) {
    states.push_back(&t->state);
    next_states.push_back(&t->next_state);
    actions.push_back(t->action);
    rewards.push_back(t->reward);
    discounts.push_back(t->discount);
    dones.push_back(t->done);
  }
  const DenseTensor next = stack(next_states);
  const auto& head = online_->spec().head;

  nn::Tape tape;
  const auto fwd = online_->forward(tape, stack(states), /*with_probes=*/true);
  const DenseTensor& out = tape.value(fwd.output);

  LossResult loss;
  if (!head.distributional()) {
    const auto y = double_q_targets(online_->q_values(next), target_->q_values(next), rewards, discounts, dones);
    loss = bellman_loss(out, actions, y, batch.weights, cfg_.huber);
  } else {
    const auto support = head.support();
    const DenseTensor q_next = online_->q_values(next);
    nn::Tape target_tape;
    const auto tf = target_->forward(target_tape, next);
    const DenseTensor p_next = nn::softmax_last(target_tape.value(tf.output));
    const std::size_t atoms = head.atoms;
    std::vector<std::vector<double>> m(b);
    for (std::size_t i = 0; i < b; ++i) {
      const auto a = argmax(q_next.data().subspan(i * head.actions, head.actions));
      m[i] = project_distribution(p_next.data().subspan((i * head.actions + a) * atoms, atoms), rewards[i],
                                  dones[i] ? 0.0 : discounts[i], support);
    }
    loss = distributional_loss(out, actions, m, batch.weights);
  }
  if (!std::isfinite(loss.loss)) throw NumericalError("non-finite loss at update " + std::to_string(updates_));

  online_->zero_grad();
  tape.backward(fwd.output, loss.grad);
  const auto info = optimizer_->step(tape, fwd.probes, b);
  replay_.update_priorities(batch.refs, loss.td_errors);

  ++updates_;
  if (updates_ % cfg_.target_period == 0) sync_target();
  return {loss.loss, info.grad_norm};
}

void Agent::sync_target() { target_->copy_parameters_from(*online_); }

}  // namespace tenrl::rl
