#include "tenrl/optim/clip.hpp"

#include <cmath>

namespace tenrl::optim {

double clip_grad_norm(const std::vector<nn::Parameter*>& params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params)
    for (double g : p->grad.data()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto* p : params)
      for (double& g : p->grad.data()) g *= scale;
  }
  return norm;
}

}  // namespace tenrl::optim
