#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tenrl/nn/network_spec.hpp"
#include "tenrl/nn/tape.hpp"
#include "tenrl/scattering.hpp"

namespace tenrl::nn {

/// One linear map y = W·a (+ b) seen by the curvature optimizer. For TRL
/// factors the map acts on the fibers of `input` along `mode`; otherwise
/// the input is flattened per sample.
struct LinearProbe {
  std::string layer;
  VarId input = kNoVar;
  VarId output = kNoVar;
  std::size_t weight = 0;            // index into Network::parameters()
  std::optional<std::size_t> bias;   // folded into A as a homogeneous coordinate
  bool weight_is_in_out = false;     // stored (in, out) rather than (out, in)
  std::size_t mode = 0;              // 0: per-sample map, k ≥ 1: fibers along mode k
};

struct ForwardResult {
  VarId output = kNoVar;  // q (B, A) or logits (B, A, atoms)
  std::vector<LinearProbe> probes;
};

class Network {
 public:
  Network(NetworkSpec spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }
  const ResolvedNetwork& resolved() const { return resolved_; }

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  /// Looks up "<layer>.<param>", e.g. "trl4.core".
  Parameter& parameter(const std::string& qualified);
  /// Parameter indices owned by a layer, in creation order.
  const std::vector<std::size_t>& layer_parameters(const std::string& layer) const;
  std::vector<std::string> layer_names() const;
  LayerKind layer_kind(const std::string& layer) const;

  bool has_frontend() const { return frontend_ != nullptr; }
  /// Applies the fixed scattering front-end (identity without one).
  /// obs (B, C, H, W) → (B, C·K, H/2^J, W/2^J).
  DenseTensor preprocess(const DenseTensor& observations) const;
  /// Per-sample shape accepted by forward().
  Shape feature_input_shape() const;

  /// Runs every learnable layer on preprocessed input (B, feature_input_shape...).
  ForwardResult forward(Tape& tape, const DenseTensor& features, bool with_probes = false);

  /// Greedy-ready q-values (B, A); distributional heads return expectations.
  DenseTensor q_values(const DenseTensor& features);

  void copy_parameters_from(const Network& other);
  void zero_grad();

 private:
  struct Layer {
    ResolvedLayer resolved;
    std::vector<std::size_t> params;
  };

  void build(std::uint64_t seed);
  std::size_t add_param(Layer& layer, const std::string& name, DenseTensor value);
  VarId run_layer(Tape& t, Layer& layer, VarId x, std::vector<LinearProbe>* probes);

  NetworkSpec spec_;
  ResolvedNetwork resolved_;
  std::vector<Layer> trunk_;
  std::vector<Layer> head_;
  std::vector<Parameter> params_;
  std::shared_ptr<const scattering::FilterBank> frontend_;
  scattering::ScatteringConfig frontend_cfg_;
};

/// Softmax over the last mode.
DenseTensor softmax_last(const DenseTensor& logits);
/// (B, A, atoms) probabilities → (B, A) expectations under `support`.
DenseTensor expected_values(const DenseTensor& probs, const std::vector<double>& support);

}  // namespace tenrl::nn
