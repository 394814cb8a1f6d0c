#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tenrl/nn/network.hpp"
#include "tenrl/optim/adam.hpp"
#include "tenrl/optim/kfac.hpp"

namespace tenrl::optim {

enum class Method { kAdam, kKfac };

struct OptimConfig {
  Method method = Method::kAdam;
  AdamConfig adam;
  KfacConfig kfac;
  double max_grad_norm = 10.0;  // 0 disables clipping

  void validate() const;
};

struct StepInfo {
  double grad_norm = 0.0;  // before clipping
};

/// Updates a network after a backward pass. Under Method::kKfac every dense
/// map and every TRL factor, core and output map is preconditioned by its
/// own Kronecker factors; all remaining parameters (convolutions) use Adam.
class Optimizer {
 public:
  Optimizer(nn::Network& net, OptimConfig cfg);

  /// `tape` must have completed backward; `probes` come from the same
  /// forward pass. `batch` is the number of samples the loss averaged over.
  StepInfo step(const nn::Tape& tape, const std::vector<nn::LinearProbe>& probes, std::size_t batch);

  const OptimConfig& config() const { return cfg_; }
  /// Layer states keyed by the probed parameter's qualified name.
  const std::map<std::string, std::unique_ptr<KfacLayerState>>& kfac_states() const { return kfac_; }

 private:
  nn::Network& net_;
  OptimConfig cfg_;
  Adam adam_;
  std::map<std::string, std::unique_ptr<KfacLayerState>> kfac_;
};

}  // namespace tenrl::optim
