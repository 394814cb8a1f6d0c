#include "tenrl/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tenrl/linalg.hpp"
#include "tenrl/nn/ops.hpp"

namespace tenrl::nn {

namespace {

DenseTensor uniform_tensor(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseTensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

DenseTensor orthonormal_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  return linalg::orthonormalize(linalg::gaussian_matrix(rows, cols, rng)).to_tensor();
}

}  // namespace

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)), resolved_(resolve(spec_)) {
  if (!resolved_.trunk.empty() && resolved_.trunk.front().spec.kind == LayerKind::kScattering) {
    const auto& l = resolved_.trunk.front();
    frontend_cfg_ = scattering::ScatteringConfig{l.spec.J, l.spec.L, l.spec.order, l.input[1], l.input[2]};
    frontend_ = std::make_shared<const scattering::FilterBank>(scattering::build_filter_bank(frontend_cfg_));
  }
  build(seed);
}

std::size_t Network::add_param(Layer& layer, const std::string& name, DenseTensor value) {
  const std::size_t idx = params_.size();
  params_.emplace_back(layer.resolved.name + "." + name, std::move(value), idx);
  layer.params.push_back(idx);
  return idx;
}

void Network::build(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto make = [&](const ResolvedLayer& r) {
    Layer layer{r, {}};
    const auto& s = r.spec;
    switch (s.kind) {
      case LayerKind::kConv: {
        const std::size_t fan_in = r.input[0] * s.kernel * s.kernel;
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        add_param(layer, "weight", uniform_tensor({s.out_channels, r.input[0], s.kernel, s.kernel}, bound, rng));
        add_param(layer, "bias", uniform_tensor({s.out_channels}, bound, rng));
        break;
      }
      case LayerKind::kDense: {
        const std::size_t fan_in = shape_size(r.input);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        add_param(layer, "weight", uniform_tensor({s.width, fan_in}, bound, rng));
        add_param(layer, "bias", uniform_tensor({s.width}, bound, rng));
        break;
      }
      case LayerKind::kTrl: {
        const std::size_t modes = r.input.size();
        for (std::size_t k = 0; k < modes; ++k) {
          add_param(layer, "factor" + std::to_string(k), orthonormal_tensor(r.input[k], r.ranks[k], rng));
        }
        Shape core_shape(r.ranks.begin(), r.ranks.end());
        const double rank_volume = static_cast<double>(shape_size(core_shape));
        std::normal_distribution<double> normal(0.0, std::sqrt(static_cast<double>(s.width) / (3.0 * rank_volume)));
        DenseTensor core(core_shape);
        for (auto& v : core.data()) v = normal(rng);
        add_param(layer, "core", std::move(core));
        add_param(layer, "factor" + std::to_string(modes), orthonormal_tensor(s.width, r.ranks[modes], rng));
        add_param(layer, "bias", uniform_tensor({s.width}, 1.0 / std::sqrt(static_cast<double>(shape_size(r.input))), rng));
        break;
      }
      default: break;
    }
    return layer;
  };
  for (const auto& r : resolved_.trunk) trunk_.push_back(make(r));
  for (const auto& r : resolved_.head) head_.push_back(make(r));
}

Parameter& Network::parameter(const std::string& qualified) {
  for (auto& p : params_)
    if (p.name == qualified) return p;
  throw std::out_of_range("no parameter named " + qualified);
}

const std::vector<std::size_t>& Network::layer_parameters(const std::string& layer) const {
  for (const auto* group : {&trunk_, &head_})
    for (const auto& l : *group)
      if (l.resolved.name == layer) return l.params;
  throw std::out_of_range("no layer named " + layer);
}

std::vector<std::string> Network::layer_names() const {
  std::vector<std::string> names;
  for (const auto* group : {&trunk_, &head_})
    for (const auto& l : *group) names.push_back(l.resolved.name);
  return names;
}

LayerKind Network::layer_kind(const std::string& layer) const {
  for (const auto* group : {&trunk_, &head_})
    for (const auto& l : *group)
      if (l.resolved.name == layer) return l.resolved.spec.kind;
  throw std::out_of_range("no layer named " + layer);
}

Shape Network::feature_input_shape() const {
  if (frontend_) return resolved_.trunk.front().output;
  return spec_.input_shape;
}

DenseTensor Network::preprocess(const DenseTensor& observations) const {
  if (!frontend_) return observations;
  const Shape& in = spec_.input_shape;
  if (observations.order() != in.size() + 1 ||
      !std::equal(in.begin(), in.end(), observations.shape().begin() + 1)) {
    throw std::invalid_argument("preprocess: observation batch does not match the network input shape");
  }
  const std::size_t batch = observations.extent(0);
  const std::size_t per_obs = shape_size(in);
  const Shape out_shape = feature_input_shape();
  const std::size_t per_out = shape_size(out_shape);
  Shape batched{batch};
  batched.insert(batched.end(), out_shape.begin(), out_shape.end());
  DenseTensor out(batched);
  for (std::size_t b = 0; b < batch; ++b) {
    DenseTensor sample(in, std::vector<double>(observations.data().begin() + b * per_obs,
                                               observations.data().begin() + (b + 1) * per_obs));
    const auto s = scattering::scatter(sample, *frontend_);
    std::copy(s.coefficients.data().begin(), s.coefficients.data().end(), out.data().begin() + b * per_out);
  }
  return out;
}

VarId Network::run_layer(Tape& t, Layer& layer, VarId x, std::vector<LinearProbe>* probes) {
  const auto& r = layer.resolved;
  const std::size_t batch = t.value(x).extent(0);
  auto param = [&](std::size_t i) { return t.parameter(params_[layer.params[i]]); };
  switch (r.spec.kind) {
    case LayerKind::kScattering: return x;
    case LayerKind::kRelu: return relu(t, x);
    case LayerKind::kFlatten: return reshape(t, x, {batch, shape_size(r.input)});
    case LayerKind::kConv: return conv2d(t, x, param(0), param(1), r.spec.stride);
    case LayerKind::kDense: {
      const VarId y = linear(t, x, param(0), param(1));
      if (probes) probes->push_back(LinearProbe{r.name, x, y, layer.params[0], layer.params[1], false, 0});
      return y;
    }
    case LayerKind::kTrl: {
      const std::size_t modes = r.input.size();
      Shape batched{batch};
      batched.insert(batched.end(), r.input.begin(), r.input.end());
      VarId z = t.value(x).shape() == batched ? x : reshape(t, x, batched);
      for (std::size_t k = 0; k < modes; ++k) {
        const VarId next = mode_product_transposed(t, z, param(k), k + 1);
        if (probes) probes->push_back(LinearProbe{r.name, z, next, layer.params[k], std::nullopt, true, k + 1});
        z = next;
      }
      const VarId h = contract_core(t, z, param(modes));
      if (probes) probes->push_back(LinearProbe{r.name, z, h, layer.params[modes], std::nullopt, true, 0});
      const VarId y = linear(t, h, param(modes + 1), param(modes + 2));
      if (probes) {
        probes->push_back(LinearProbe{r.name, h, y, layer.params[modes + 1], layer.params[modes + 2], false, 0});
      }
      return y;
    }
  }
  return x;
}

ForwardResult Network::forward(Tape& tape, const DenseTensor& features, bool with_probes) {
  const Shape expected = feature_input_shape();
  if (features.order() != expected.size() + 1 ||
      !std::equal(expected.begin(), expected.end(), features.shape().begin() + 1)) {
    throw std::invalid_argument("forward: input batch does not match the network input shape");
  }
  ForwardResult res;
  std::vector<LinearProbe>* probes = with_probes ? &res.probes : nullptr;
  VarId x = tape.constant(features);
  for (auto& layer : trunk_) x = run_layer(tape, layer, x, probes);
  const auto& h = spec_.head;
  if (h.dueling) {
    const VarId v = run_layer(tape, head_[0], x, probes);
    const VarId a = run_layer(tape, head_[1], x, probes);
    res.output = dueling_combine(tape, v, a, h.actions, h.atoms);
  } else {
    res.output = action_view(tape, run_layer(tape, head_[0], x, probes), h.actions, h.atoms);
  }
  return res;
}

DenseTensor Network::q_values(const DenseTensor& features) {
  Tape tape;
  const auto res = forward(tape, features);
  const auto& out = tape.value(res.output);
  if (!spec_.head.distributional()) return out;
  return expected_values(softmax_last(out), spec_.head.support());
}

void Network::copy_parameters_from(const Network& other) {
  if (other.params_.size() != params_.size()) throw std::invalid_argument("copy_parameters_from: architecture mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (other.params_[i].value.shape() != params_[i].value.shape()) {
      throw std::invalid_argument("copy_parameters_from: shape mismatch for " + params_[i].name);
    }
    params_[i].value = other.params_[i].value;
  }
}

void Network::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

DenseTensor softmax_last(const DenseTensor& logits) {
  const std::size_t n = logits.extent(logits.order() - 1);
  DenseTensor p(logits.shape());
  for (std::size_t base = 0; base < logits.size(); base += n) {
    double m = logits[base];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, logits[base + i]);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += (p[base + i] = std::exp(logits[base + i] - m));
    for (std::size_t i = 0; i < n; ++i) p[base + i] /= z;
  }
  return p;
}

DenseTensor expected_values(const DenseTensor& probs, const std::vector<double>& support) {
  if (probs.order() != 3 || probs.extent(2) != support.size()) {
    throw std::invalid_argument("expected_values: probabilities must be (B, A, atoms)");
  }
  const std::size_t batch = probs.extent(0);
  const std::size_t actions = probs.extent(1);
  const std::size_t atoms = support.size();
  DenseTensor q({batch, actions});
  for (std::size_t i = 0; i < batch * actions; ++i) {
    double s = 0.0;
    for (std::size_t z = 0; z < atoms; ++z) s += probs[i * atoms + z] * support[z];
    q[i] = s;
  }
  return q;
}

}  // namespace tenrl::nn
