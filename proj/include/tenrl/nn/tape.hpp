#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::nn {

/// A learnable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  DenseTensor value;
  DenseTensor grad;
  std::size_t id = 0;

  Parameter() = default;
  Parameter(std::string n, DenseTensor v, std::size_t handle)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()), id(handle) {}

  void zero_grad() { grad = DenseTensor(value.shape()); }
};

using VarId = std::size_t;
inline constexpr VarId kNoVar = std::numeric_limits<VarId>::max();

class Tape;
using BackwardFn = std::function<void(Tape&, VarId output)>;

/// Records executed operations so gradients can be propagated in exact
/// reverse order. A tape supports a single backward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  VarId constant(DenseTensor value);
  VarId parameter(Parameter& p);
  /// Adds the output of an operation. `fn` runs during backward when the
  /// output received a gradient.
  VarId record(DenseTensor value, bool requires_grad, BackwardFn fn);

  const DenseTensor& value(VarId id) const { return nodes_.at(id).value; }
  bool requires_grad(VarId id) const { return nodes_.at(id).requires_grad; }
  /// Gradient reaching a node after backward; empty when none arrived.
  const DenseTensor& grad(VarId id) const { return nodes_.at(id).grad; }
  /// Zero-initialized gradient buffer for accumulation inside backward functions.
  DenseTensor& grad_buffer(VarId id);

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  /// Propagates `output_grad` from `output` and adds parameter gradients into
  /// each linked Parameter::grad.
  void backward(VarId output, const DenseTensor& output_grad);

 private:
  struct Node {
    DenseTensor value;
    DenseTensor grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace tenrl::nn
