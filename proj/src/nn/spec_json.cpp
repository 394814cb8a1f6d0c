#include "tenrl/nn/spec_json.hpp"

#include "tenrl/json_fields.hpp"

namespace tenrl::nn {

namespace {

LayerKind kind_from_string(const std::string& s, const std::string& where) {
  for (auto k : {LayerKind::kScattering, LayerKind::kConv, LayerKind::kRelu, LayerKind::kFlatten, LayerKind::kDense,
                 LayerKind::kTrl}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError(where, "unknown layer type '" + s + "'");
}

LayerSpec layer_from_json(const nlohmann::json& j, const std::string& path) {
  ObjectReader r(j, path);
  LayerSpec l;
  l.kind = kind_from_string(r.require<std::string>("type"), r.path("type"));
  switch (l.kind) {
    case LayerKind::kConv:
      l.out_channels = r.require<std::size_t>("out_channels");
      l.kernel = r.require<std::size_t>("kernel");
      l.stride = r.get<std::size_t>("stride", 1);
      break;
    case LayerKind::kDense: l.width = r.require<std::size_t>("width"); break;
    case LayerKind::kTrl:
      l.width = r.require<std::size_t>("width");
      l.rank = r.get<std::size_t>("rank", 0);
      l.ranks = r.get<std::vector<std::size_t>>("ranks", {});
      if (l.rank == 0 && l.ranks.empty()) throw ConfigError(path, "trl layer needs `rank` or `ranks`");
      break;
    case LayerKind::kScattering:
      l.J = r.get<int>("J", 2);
      l.L = r.get<int>("L", 4);
      l.order = r.get<int>("order", 2);
      break;
    case LayerKind::kRelu:
    case LayerKind::kFlatten: break;
  }
  r.finish();
  return l;
}

}  // namespace

NetworkSpec network_spec_from_json(const nlohmann::json& j, const std::string& path) {
  ObjectReader r(j, path);
  NetworkSpec spec;
  spec.input_shape = r.require<std::vector<std::size_t>>("input_shape");
  const auto& layers = r.child("layers");
  if (!layers.is_array()) throw ConfigError(r.path("layers"), "expected an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    spec.layers.push_back(layer_from_json(layers[i], r.path("layers") + "[" + std::to_string(i) + "]"));
  }
  ObjectReader h(r.child("head"), r.path("head"));
  spec.head.actions = h.require<std::size_t>("actions");
  spec.head.dueling = h.get<bool>("dueling", true);
  spec.head.atoms = h.get<std::size_t>("atoms", 1);
  spec.head.v_min = h.get<double>("v_min", -10.0);
  spec.head.v_max = h.get<double>("v_max", 10.0);
  const auto final_kind = h.get<std::string>("final", "dense");
  spec.head.final_kind = kind_from_string(final_kind, h.path("final"));
  spec.head.final_rank = h.get<std::size_t>("final_rank", 0);
  if (spec.head.final_kind == LayerKind::kTrl && spec.head.final_rank == 0) {
    throw ConfigError(h.path("final_rank"), "a trl output layer needs a positive rank");
  }
  h.finish();
  r.finish();
  return spec;
}

nlohmann::json to_json(const NetworkSpec& spec) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : spec.layers) {
    nlohmann::json o{{"type", to_string(l.kind)}};
    switch (l.kind) {
      case LayerKind::kConv:
        o["out_channels"] = l.out_channels;
        o["kernel"] = l.kernel;
        o["stride"] = l.stride;
        break;
      case LayerKind::kDense: o["width"] = l.width; break;
      case LayerKind::kTrl:
        o["width"] = l.width;
        if (l.rank) o["rank"] = l.rank;
        if (!l.ranks.empty()) o["ranks"] = l.ranks;
        break;
      case LayerKind::kScattering:
        o["J"] = l.J;
        o["L"] = l.L;
        o["order"] = l.order;
        break;
      default: break;
    }
    layers.push_back(std::move(o));
  }
  const auto& h = spec.head;
  nlohmann::json head{{"actions", h.actions}, {"dueling", h.dueling}, {"atoms", h.atoms},   {"v_min", h.v_min},
                      {"v_max", h.v_max},     {"final", to_string(h.final_kind)}, {"final_rank", h.final_rank}};
  return {{"input_shape", spec.input_shape}, {"layers", layers}, {"head", head}};
}

}  // namespace tenrl::nn
