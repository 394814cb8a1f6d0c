#pragma once

#include <vector>

#include "tenrl/nn/tape.hpp"

namespace tenrl::optim {

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm measured before clipping.
double clip_grad_norm(const std::vector<nn::Parameter*>& params, double max_norm);

}  // namespace tenrl::optim
