#pragma once

#include <string>
#include <vector>

#include "tenrl/tensor.hpp"

namespace tenrl::nn {

enum class LayerKind { kScattering, kConv, kRelu, kFlatten, kDense, kTrl };

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  // conv
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  // dense / trl
  std::size_t width = 0;
  // trl: explicit per-mode ranks (input modes then output), or a scalar rank
  // r mapped to (min(r, I_1), …, min(r, I_M), min(r, width)).
  std::vector<std::size_t> ranks;
  std::size_t rank = 0;
  // scattering
  int J = 2;
  int L = 4;
  int order = 2;
};

/// Output head: optional dueling split followed by scalar or distributional q-values.
struct HeadSpec {
  std::size_t actions = 0;
  bool dueling = true;
  std::size_t atoms = 1;  // 1 = scalar q-values
  double v_min = -10.0;
  double v_max = 10.0;
  LayerKind final_kind = LayerKind::kDense;  // kDense or kTrl
  std::size_t final_rank = 0;

  bool distributional() const { return atoms > 1; }
  std::vector<double> support() const;
};

struct NetworkSpec {
  Shape input_shape;  // per-sample shape, e.g. (C, H, W)
  std::vector<LayerSpec> layers;
  HeadSpec head;
};

/// Per-layer shapes after resolving a spec against its input shape.
struct ResolvedLayer {
  std::string name;
  LayerSpec spec;
  Shape input;
  Shape output;
  std::vector<std::size_t> ranks;  // trl only: resolved per-mode ranks
};

struct ResolvedNetwork {
  std::vector<ResolvedLayer> trunk;
  std::vector<ResolvedLayer> head;  // "value" and "advantage", or a single "q"
  Shape features;                   // shape entering the head
};

/// Validates shapes layer by layer; throws ConfigError naming the layer.
ResolvedNetwork resolve(const NetworkSpec& spec);

/// Same architecture with every TRL replaced by a dense layer of equal width.
NetworkSpec dense_equivalent(const NetworkSpec& spec);

struct LayerCount {
  std::string name;
  LayerKind kind;
  std::size_t coefficients = 0;
  bool linear = false;  // dense or trl, i.e. counted as head coefficients
};

struct ParameterCount {
  std::vector<LayerCount> layers;
  std::size_t total = 0;
  std::size_t linear_total = 0;
};

ParameterCount count_parameters(const NetworkSpec& spec);

}  // namespace tenrl::nn
