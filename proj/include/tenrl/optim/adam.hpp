#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "tenrl/nn/tape.hpp"

namespace tenrl::optim {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1.5e-4;

  void validate() const;
};

/// Bias-corrected Adam. Moment buffers are keyed by Parameter::id; one call
/// to step() counts as one time step for every parameter passed in.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {});

  void step(const std::vector<nn::Parameter*>& params);
  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::unordered_map<std::size_t, Moments> state_;
};

}  // namespace tenrl::optim
