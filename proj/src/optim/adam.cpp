#include "tenrl/optim/adam.hpp"

#include <cmath>

#include "tenrl/errors.hpp"

namespace tenrl::optim {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("optim.lr", "must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("optim.beta1", "must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("optim.beta2", "must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("optim.eps", "must be positive");
}

Adam::Adam(AdamConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Adam::step(const std::vector<nn::Parameter*>& params) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto* p : params) {
    auto& s = state_[p->id];
    const std::size_t n = p->value.size();
    if (s.m.size() != n) {
      s.m.assign(n, 0.0);
      s.v.assign(n, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double g = p->grad.empty() ? 0.0 : p->grad[i];
      s.m[i] = cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * g;
      s.v[i] = cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * g * g;
      p->value[i] -= cfg_.lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + cfg_.eps);
    }
  }
}

}  // namespace tenrl::optim
