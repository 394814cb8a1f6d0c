#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "tenrl/rl/sum_tree.hpp"

namespace tenrl::rl {

/// n-step transition. `reward` is Σ_{k<m} γ^k r_{t+k} over the m ≤ n steps
/// actually taken and `discount` is γ^m; when `done` the bootstrap term is dropped.
struct Transition {
  std::vector<float> state;
  int action = 0;
  double reward = 0.0;
  std::vector<float> next_state;
  bool done = false;
  double discount = 1.0;
};

/// Identifies a sampled slot together with the write it came from, so a
/// priority update for an overwritten slot can be recognised and dropped.
struct SampleRef {
  std::size_t slot = 0;
  std::uint64_t serial = 0;
};

struct SampledBatch {
  std::vector<SampleRef> refs;
  std::vector<const Transition*> transitions;
  std::vector<double> weights;        // importance weights, max 1
  std::vector<double> probabilities;  // P(i) at sampling time
};

/// Proportional prioritized replay over a ring buffer.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t capacity, double alpha, double priority_eps = 1e-6);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return tree_.capacity(); }
  double alpha() const { return alpha_; }
  double max_priority() const { return max_priority_; }
  const SumTree& tree() const { return tree_; }
  const Transition& at(std::size_t slot) const { return data_.at(slot); }

  /// Stores with the current max priority; the returned reference can be
  /// passed to update_priorities until the slot is overwritten.
  SampleRef push(Transition t);

  /// Stratified proportional sampling: the priority mass is cut into
  /// `batch` equal segments and one point is drawn uniformly in each.
  SampledBatch sample(std::size_t batch, double beta, std::mt19937_64& rng) const;

  /// priority = (|td| + eps)^α. Stale references are skipped; returns how many were applied.
  std::size_t update_priorities(const std::vector<SampleRef>& refs, const std::vector<double>& td_errors);

 private:
  SumTree tree_;
  std::vector<Transition> data_;
  std::vector<std::uint64_t> serials_;
  double alpha_;
  double eps_;
  double max_priority_ = 1.0;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  std::uint64_t writes_ = 0;
};

/// Turns a stream of single steps into n-step transitions.
class NStepAccumulator {
 public:
  NStepAccumulator(std::size_t n, double gamma);

  /// Records (s, a, r, s'). `terminal` ends the episode without bootstrap;
  /// `truncated` ends it at a time limit, keeping the bootstrap from s'.
  std::vector<Transition> push(const std::vector<float>& state, int action, double reward,
                               const std::vector<float>& next_state, bool terminal, bool truncated);
  void reset() { pending_.clear(); }
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Step {
    std::vector<float> state;
    int action;
    double reward;
  };
  Transition emit(std::size_t count, const std::vector<float>& bootstrap, bool done) const;

  std::size_t n_;
  double gamma_;
  std::deque<Step> pending_;
};

}  // namespace tenrl::rl
