#include "tenrl/nn/tape.hpp"

#include <stdexcept>

namespace tenrl::nn {

VarId Tape::constant(DenseTensor value) {
  if (consumed_) throw std::logic_error("tape already consumed by backward");
  nodes_.push_back(Node{std::move(value), {}, nullptr, false, {}});
  return nodes_.size() - 1;
}

VarId Tape::parameter(Parameter& p) {
  if (consumed_) throw std::logic_error("tape already consumed by backward");
  nodes_.push_back(Node{p.value, {}, &p, true, {}});
  return nodes_.size() - 1;
}

VarId Tape::record(DenseTensor value, bool requires_grad, BackwardFn fn) {
  if (consumed_) throw std::logic_error("tape already consumed by backward");
  nodes_.push_back(Node{std::move(value), {}, nullptr, requires_grad, requires_grad ? std::move(fn) : BackwardFn{}});
  return nodes_.size() - 1;
}

DenseTensor& Tape::grad_buffer(VarId id) {
  auto& n = nodes_.at(id);
  if (n.grad.empty()) n.grad = DenseTensor(n.value.shape());
  return n.grad;
}

void Tape::backward(VarId output, const DenseTensor& output_grad) {
  if (consumed_) throw std::logic_error("tape reuse: backward already ran on this tape");
  auto& out = nodes_.at(output);
  if (output_grad.shape() != out.value.shape()) throw std::invalid_argument("backward: output gradient shape mismatch");
  consumed_ = true;
  out.grad = output_grad;
  for (VarId id = output + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (n.grad.empty() || !n.requires_grad) continue;
    if (n.backward) n.backward(*this, id);
    if (n.param != nullptr) {
      auto& g = n.param->grad;
      if (g.shape() != n.grad.shape()) g = DenseTensor(n.grad.shape());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  }
}

}  // namespace tenrl::nn
