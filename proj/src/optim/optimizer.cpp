#include "tenrl/optim/optimizer.hpp"

#include <cmath>
#include <set>

#include "tenrl/errors.hpp"
#include "tenrl/optim/clip.hpp"

namespace tenrl::optim {

void OptimConfig::validate() const {
  adam.validate();
  kfac.validate();
  if (!(max_grad_norm >= 0.0)) throw ConfigError("optim.max_grad_norm", "must be non-negative");
}

Optimizer::Optimizer(nn::Network& net, OptimConfig cfg) : net_(net), cfg_(cfg), adam_(cfg.adam) { cfg_.validate(); }

namespace {

// Rows are the samples (mode 0) or the mode-k fibers of every sample.
Matrix rows_of(const DenseTensor& t, std::size_t mode) {
  if (mode == 0) {
    const std::size_t batch = t.extent(0);
    return Matrix(batch, t.size() / batch, t.values());
  }
  return unfold(t, mode).transposed();
}

struct PendingUpdate {
  nn::Parameter* weight;
  nn::Parameter* bias;
  bool in_out;
  Matrix delta;  // (out × in[+1])
};

}  // namespace

StepInfo Optimizer::step(const nn::Tape& tape, const std::vector<nn::LinearProbe>& probes, std::size_t batch) {
  auto& params = net_.parameters();
  std::vector<nn::Parameter*> all;
  for (auto& p : params) all.push_back(&p);
  StepInfo info;
  info.grad_norm = cfg_.max_grad_norm > 0.0 ? clip_grad_norm(all, cfg_.max_grad_norm) : clip_grad_norm(all, INFINITY);
  if (!std::isfinite(info.grad_norm)) throw NumericalError("non-finite gradient norm");

  if (cfg_.method == Method::kAdam) {
    adam_.step(all);
    return info;
  }

  std::set<std::size_t> covered;
  std::vector<PendingUpdate> pending;
  for (const auto& probe : probes) {
    const auto& out_grad = tape.grad(probe.output);
    if (out_grad.empty()) continue;
    nn::Parameter& w = params[probe.weight];
    nn::Parameter* b = probe.bias ? &params[*probe.bias] : nullptr;

    const Matrix a = rows_of(tape.value(probe.input), probe.mode);
    Matrix g = rows_of(out_grad, probe.mode);
    const double fibers = static_cast<double>(a.rows()) / static_cast<double>(batch);
    const double scale = static_cast<double>(batch) * std::sqrt(fibers);
    for (auto& v : g.data()) v *= scale;

    auto& state = kfac_[w.name];
    if (!state) state = std::make_unique<KfacLayerState>(a.cols(), g.cols(), b != nullptr, cfg_.kfac);
    state->accumulate(a, g);

    const std::size_t din = a.cols();
    const std::size_t dout = g.cols();
    Matrix grad(dout, state->dim_a());
    for (std::size_t o = 0; o < dout; ++o) {
      for (std::size_t i = 0; i < din; ++i) grad(o, i) = probe.weight_is_in_out ? w.grad[i * dout + o] : w.grad[o * din + i];
      if (b) grad(o, din) = b->grad[o];
    }
    pending.push_back(PendingUpdate{&w, b, probe.weight_is_in_out, state->precondition(grad)});
    covered.insert(probe.weight);
    if (probe.bias) covered.insert(*probe.bias);
  }

  double scale = cfg_.kfac.lr;
  if (cfg_.kfac.max_update_norm > 0.0) {
    double sq = 0.0;
    for (const auto& u : pending)
      for (double v : u.delta.data()) sq += v * v;
    const double norm = cfg_.kfac.lr * std::sqrt(sq);
    if (norm > cfg_.kfac.max_update_norm) scale *= cfg_.kfac.max_update_norm / norm;
  }
  for (const auto& u : pending) {
    const std::size_t dout = u.delta.rows();
    const std::size_t din = u.delta.cols() - (u.bias ? 1 : 0);
    for (std::size_t o = 0; o < dout; ++o) {
      for (std::size_t i = 0; i < din; ++i) {
        const double d = scale * u.delta(o, i);
        if (u.in_out) {
          u.weight->value[i * dout + o] -= d;
        } else {
          u.weight->value[o * din + i] -= d;
        }
      }
      if (u.bias) u.bias->value[o] -= scale * u.delta(o, din);
    }
  }

  std::vector<nn::Parameter*> rest;
  for (auto& p : params)
    if (!covered.count(p.id)) rest.push_back(&p);
  if (!rest.empty()) adam_.step(rest);
  return info;
}

}  // namespace tenrl::optim
