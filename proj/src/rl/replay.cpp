#include "tenrl/rl/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tenrl::rl {

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, double alpha, double priority_eps)
    : tree_(capacity), data_(capacity), serials_(capacity, 0), alpha_(alpha), eps_(priority_eps) {
  if (alpha < 0.0) throw std::invalid_argument("PrioritizedReplay: alpha must be non-negative");
}

SampleRef PrioritizedReplay::push(Transition t) {
  const std::size_t slot = next_;
  data_[slot] = std::move(t);
  serials_[slot] = ++writes_;
  tree_.set(slot, max_priority_);
  next_ = (next_ + 1) % capacity();
  size_ = std::min(size_ + 1, capacity());
  return {slot, serials_[slot]};
}

SampledBatch PrioritizedReplay::sample(std::size_t batch, double beta, std::mt19937_64& rng) const {
  if (batch == 0) throw std::invalid_argument("sample: batch must be positive");
  if (size_ < batch) throw std::logic_error("sample: replay holds fewer transitions than the batch size");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch);
  SampledBatch out;
  double max_w = 0.0;
  for (std::size_t k = 0; k < batch; ++k) {
    const double mass = std::min((static_cast<double>(k) + unit(rng)) * segment, std::nextafter(total, 0.0));
    const std::size_t slot = tree_.find(mass);
    const double p = tree_.get(slot) / total;
    const double w = std::pow(static_cast<double>(size_) * p, -beta);
    out.refs.push_back({slot, serials_[slot]});
    out.transitions.push_back(&data_[slot]);
    out.probabilities.push_back(p);
    out.weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  for (auto& w : out.weights) w /= max_w;
  return out;
}

std::size_t PrioritizedReplay::update_priorities(const std::vector<SampleRef>& refs,
                                                 const std::vector<double>& td_errors) {
  if (refs.size() != td_errors.size()) throw std::invalid_argument("update_priorities: size mismatch");
  std::size_t applied = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& r = refs[i];
    if (r.slot >= capacity() || serials_[r.slot] != r.serial) continue;
    const double p = std::pow(std::abs(td_errors[i]) + eps_, alpha_);
    tree_.set(r.slot, p);
    max_priority_ = std::max(max_priority_, p);
    ++applied;
  }
  return applied;
}

NStepAccumulator::NStepAccumulator(std::size_t n, double gamma) : n_(n), gamma_(gamma) {
  if (n == 0) throw std::invalid_argument("NStepAccumulator: n must be positive");
}

Transition NStepAccumulator::emit(std::size_t count, const std::vector<float>& bootstrap, bool done) const {
  Transition t;
  t.state = pending_.front().state;
  t.action = pending_.front().action;
  double g = 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    t.reward += g * pending_[k].reward;
    g *= gamma_;
  }
  t.discount = g;
  t.next_state = bootstrap;
  t.done = done;
  return t;
}

std::vector<Transition> NStepAccumulator::push(const std::vector<float>& state, int action, double reward,
                                               const std::vector<float>& next_state, bool terminal, bool truncated) {
  pending_.push_back({state, action, reward});
  std::vector<Transition> out;
  if (terminal || truncated) {
    while (!pending_.empty()) {
      out.push_back(emit(pending_.size(), next_state, terminal));
      pending_.pop_front();
    }
  } else if (pending_.size() == n_) {
    out.push_back(emit(n_, next_state, false));
    pending_.pop_front();
  }
  return out;
}

}  // namespace tenrl::rl
