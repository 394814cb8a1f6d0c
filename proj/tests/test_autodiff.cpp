#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <random>

#include "tenrl/decomp.hpp"
#include "tenrl/errors.hpp"
#include "tenrl/nn/checkpoint.hpp"
#include "tenrl/nn/network.hpp"
#include "tenrl/nn/ops.hpp"
#include "test_util.hpp"

using namespace tenrl;
using namespace tenrl::nn;
using tenrl::testing::random_tensor;
using tenrl::testing::rel_err;

namespace {

// Builds a graph from fresh parameter leaves and returns its output node.
using GraphFn = std::function<VarId(Tape&, std::vector<VarId>&)>;

// Scalar probe L = Σ c ⊙ out for a fixed random c.
double probe_loss(std::vector<Parameter>& params, const GraphFn& fn, const DenseTensor& c) {
  Tape t;
  std::vector<VarId> ids;
  for (auto& p : params) ids.push_back(t.parameter(p));
  const auto& out = t.value(fn(t, ids));
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += c[i] * out[i];
  return s;
}

// Central differences against reverse mode for every coordinate of every parameter.
double max_fd_error(std::vector<Parameter>& params, const GraphFn& fn, std::uint64_t seed, double h = 1e-5) {
  std::mt19937_64 rng(seed);
  DenseTensor c;
  {
    Tape t;
    std::vector<VarId> ids;
    for (auto& p : params) ids.push_back(t.parameter(p));
    const VarId out = fn(t, ids);
    c = random_tensor(t.value(out).shape(), rng);
    for (auto& p : params) p.zero_grad();
    t.backward(out, c);
  }
  double worst = 0.0;
  for (auto& p : params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double up = probe_loss(params, fn, c);
      p.value[i] = saved - h;
      const double down = probe_loss(params, fn, c);
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(numeric - p.grad[i]) / std::max({std::abs(numeric), std::abs(p.grad[i]), 1e-3}));
    }
  }
  return worst;
}

Parameter make_param(const std::string& name, Shape shape, std::mt19937_64& rng, std::size_t id) {
  return Parameter(name, random_tensor(std::move(shape), rng), id);
}

NetworkSpec small_trl_spec(bool dueling, std::size_t atoms, LayerKind final_kind) {
  NetworkSpec s;
  s.input_shape = {2, 6, 6};
  LayerSpec conv;
  conv.kind = LayerKind::kConv;
  conv.out_channels = 3;
  conv.kernel = 2;
  conv.stride = 2;
  LayerSpec relu_layer;
  relu_layer.kind = LayerKind::kRelu;
  LayerSpec trl;
  trl.kind = LayerKind::kTrl;
  trl.width = 5;
  trl.ranks = {2, 3, 2, 4};
  s.layers = {conv, relu_layer, trl, relu_layer};
  s.head.actions = 3;
  s.head.dueling = dueling;
  s.head.atoms = atoms;
  s.head.v_min = -2.0;
  s.head.v_max = 2.0;
  s.head.final_kind = final_kind;
  s.head.final_rank = 2;
  return s;
}

DenseTensor batched_input(const NetworkSpec& spec, std::size_t batch, std::mt19937_64& rng) {
  Shape shape{batch};
  shape.insert(shape.end(), spec.input_shape.begin(), spec.input_shape.end());
  return random_tensor(shape, rng);
}

}  // namespace

TEST(TapeOps, LinearMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  std::vector<Parameter> ps{make_param("x", {4, 5}, rng, 0), make_param("w", {3, 5}, rng, 1),
                            make_param("b", {3}, rng, 2)};
  EXPECT_LT(max_fd_error(ps, [](Tape& t, auto& v) { return linear(t, v[0], v[1], v[2]); }, 2), 1e-7);
}

TEST(TapeOps, LinearFlattensTrailingModes) {
  std::mt19937_64 rng(3);
  std::vector<Parameter> ps{make_param("x", {2, 3, 2}, rng, 0), make_param("w", {4, 6}, rng, 1)};
  EXPECT_LT(max_fd_error(ps, [](Tape& t, auto& v) { return linear(t, v[0], v[1], kNoVar); }, 4), 1e-7);
}

TEST(TapeOps, Conv2dMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::vector<Parameter> ps{make_param("x", {2, 2, 7, 7}, rng, 0), make_param("w", {3, 2, 3, 3}, rng, 1),
                            make_param("b", {3}, rng, 2)};
  EXPECT_LT(max_fd_error(ps, [](Tape& t, auto& v) { return conv2d(t, v[0], v[1], v[2], 2); }, 6), 1e-7);
}

TEST(TapeOps, Conv2dAgreesWithDirectLoop) {
  std::mt19937_64 rng(7);
  const DenseTensor x = random_tensor({1, 2, 5, 5}, rng);
  const DenseTensor w = random_tensor({2, 2, 2, 2}, rng);
  const DenseTensor b = random_tensor({2}, rng);
  Tape t;
  const VarId y = conv2d(t, t.constant(x), t.constant(w), t.constant(b), 3);
  const auto& out = t.value(y);
  ASSERT_EQ(out.shape(), (Shape{1, 2, 2, 2}));
  for (std::size_t o = 0; o < 2; ++o)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        double s = b[o];
        for (std::size_t c = 0; c < 2; ++c)
          for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t q = 0; q < 2; ++q) s += w.at({o, c, p, q}) * x.at({0, c, 3 * i + p, 3 * j + q});
        EXPECT_NEAR(out.at({0, o, i, j}), s, 1e-12);
      }
}

TEST(TapeOps, ReluGradientIsZeroAtAndBelowZero) {
  Tape t;
  Parameter p("x", DenseTensor({1, 4}, {-1.0, 0.0, 2.0, 3.0}), 0);
  const VarId y = relu(t, t.parameter(p));
  t.backward(y, DenseTensor({1, 4}, 1.0));
  EXPECT_EQ(p.grad.values(), (std::vector<double>{0.0, 0.0, 1.0, 1.0}));
  EXPECT_EQ(t.value(y).values(), (std::vector<double>{0.0, 0.0, 2.0, 3.0}));
}

TEST(TapeOps, ModeProductTransposedMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (std::size_t mode = 1; mode <= 3; ++mode) {
    Shape zs{2, 3, 4, 2};
    std::vector<Parameter> ps{make_param("z", zs, rng, 0), make_param("u", {zs[mode], 2}, rng, 1)};
    const double err = max_fd_error(
        ps, [mode](Tape& t, auto& v) { return mode_product_transposed(t, v[0], v[1], mode); }, 10 + mode);
    EXPECT_LT(err, 1e-7) << "mode " << mode;
  }
}

TEST(TapeOps, ModeProductTransposedAgreesWithModeNProduct) {
  std::mt19937_64 rng(11);
  const DenseTensor z = random_tensor({2, 3, 4}, rng);
  const DenseTensor u = random_tensor({4, 2}, rng);
  Tape t;
  const VarId y = mode_product_transposed(t, t.constant(z), t.constant(u), 2);
  const DenseTensor expected = mode_n_product(z, Matrix::from_tensor(u).transposed(), 2);
  EXPECT_LT(max_abs_diff(t.value(y).data(), expected.data()), 1e-13);
}

TEST(TapeOps, ContractCoreMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::vector<Parameter> ps{make_param("z", {3, 2, 3}, rng, 0), make_param("g", {2, 3, 4}, rng, 1)};
  EXPECT_LT(max_fd_error(ps, [](Tape& t, auto& v) { return contract_core(t, v[0], v[1]); }, 14), 1e-7);
}

TEST(TapeOps, DuelingCombineMatchesFiniteDifferences) {
  std::mt19937_64 rng(15);
  for (std::size_t atoms : {std::size_t{1}, std::size_t{4}}) {
    std::vector<Parameter> ps{make_param("v", {2, atoms}, rng, 0), make_param("a", {2, 3 * atoms}, rng, 1)};
    const double err =
        max_fd_error(ps, [atoms](Tape& t, auto& v) { return dueling_combine(t, v[0], v[1], 3, atoms); }, 16);
    EXPECT_LT(err, 1e-7) << "atoms " << atoms;
  }
}

TEST(TapeOps, DuelingAdvantagesAreMeanCentered) {
  Tape t;
  const VarId v = t.constant(DenseTensor({1, 1}, {10.0}));
  const VarId a = t.constant(DenseTensor({1, 3}, {1.0, 2.0, 6.0}));
  const auto& q = t.value(dueling_combine(t, v, a, 3, 1));
  EXPECT_EQ(q.values(), (std::vector<double>{8.0, 9.0, 13.0}));
}

TEST(TapeOps, SharedNodeAccumulatesGradient) {
  Tape t;
  Parameter p("x", DenseTensor({1, 2}, {1.5, -2.0}), 0);
  const VarId x = t.parameter(p);
  const VarId y = linear(t, x, x, kNoVar);  // x·xᵀ
  t.backward(y, DenseTensor({1, 1}, 1.0));
  EXPECT_EQ(p.grad.values(), (std::vector<double>{3.0, -4.0}));
}

TEST(TapeOps, SecondBackwardIsRejected) {
  Tape t;
  Parameter p("x", DenseTensor({1}, 1.0), 0);
  const VarId s = sum_all(t, t.parameter(p));
  t.backward(s, DenseTensor({1}, 1.0));
  EXPECT_THROW(t.backward(s, DenseTensor({1}, 1.0)), std::logic_error);
}

TEST(Trl, FactoredForwardEqualsReconstructedDenseOracle) {
  NetworkSpec spec = small_trl_spec(false, 1, LayerKind::kDense);
  spec.layers = {spec.layers[2]};
  spec.input_shape = {3, 4, 2};
  Network net(spec, 21);
  std::mt19937_64 rng(22);
  const DenseTensor x = batched_input(spec, 4, rng);

  Tape t;
  VarId z = t.constant(x);
  std::vector<VarId> p;
  for (auto idx : net.layer_parameters("trl0")) p.push_back(t.parameter(net.parameters()[idx]));
  for (std::size_t k = 0; k < 3; ++k) z = mode_product_transposed(t, z, p[k], k + 1);
  const VarId y = linear(t, contract_core(t, z, p[3]), p[4], p[5]);

  decomp::TuckerDecomposition w;
  w.core = net.parameter("trl0.core").value;
  for (int k = 0; k < 4; ++k) w.factors.push_back(Matrix::from_tensor(net.parameter("trl0.factor" + std::to_string(k)).value));
  const DenseTensor weight = decomp::tucker_reconstruct(w);  // (3, 4, 2, 5)
  const DenseTensor oracle = generalized_inner_product(x, weight, 3);
  const auto& bias = net.parameter("trl0.bias").value;
  const auto& got = t.value(y);
  ASSERT_EQ(got.shape(), (Shape{4, 5}));
  double worst = 0.0;
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t o = 0; o < 5; ++o) worst = std::max(worst, std::abs(got.at({b, o}) - oracle.at({b, o}) - bias[o]));
  EXPECT_LT(worst, 1e-10);
}

TEST(Trl, NetworkGradientsMatchFiniteDifferences) {
  for (auto [dueling, atoms, final_kind] : {std::tuple{false, std::size_t{1}, LayerKind::kDense},
                                             std::tuple{true, std::size_t{1}, LayerKind::kTrl},
                                             std::tuple{true, std::size_t{5}, LayerKind::kTrl}}) {
    const NetworkSpec spec = small_trl_spec(dueling, atoms, final_kind);
    Network net(spec, 31);
    std::mt19937_64 rng(32);
    const DenseTensor x = batched_input(spec, 3, rng);
    auto& params = net.parameters();
    // Parameters are leaves owned by the network; the graph ignores `ids`.
    GraphFn fn = [&](Tape& t, std::vector<VarId>&) { return net.forward(t, x).output; };
    std::mt19937_64 crng(33);
    DenseTensor c;
    {
      Tape t;
      std::vector<VarId> unused;
      const VarId out = fn(t, unused);
      c = random_tensor(t.value(out).shape(), crng);
      net.zero_grad();
      t.backward(out, c);
    }
    double worst = 0.0;
    std::vector<Parameter> none;
    const double h = 1e-5;
    for (auto& p : params) {
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        const double saved = p.value[i];
        p.value[i] = saved + h;
        const double up = probe_loss(none, fn, c);
        p.value[i] = saved - h;
        const double down = probe_loss(none, fn, c);
        p.value[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, rel_err(numeric, p.grad[i]));
      }
    }
    EXPECT_LT(worst, 1e-5) << "dueling=" << dueling << " atoms=" << atoms;
  }
}

TEST(Network, ProbesCoverEveryLinearMap) {
  Network net(small_trl_spec(true, 1, LayerKind::kTrl), 41);
  std::mt19937_64 rng(42);
  Tape t;
  const auto res = net.forward(t, batched_input(net.spec(), 2, rng), true);
  // trl2: 3 input factors, core, output map. Each one-mode head TRL: factor, core, output map.
  EXPECT_EQ(res.probes.size(), 5u + 3u + 3u);
  for (const auto& probe : res.probes) {
    const auto& w = net.parameters()[probe.weight];
    EXPECT_NE(w.name.find(probe.layer), std::string::npos);
  }
}

TEST(Network, SameSeedSameParameters) {
  Network a(small_trl_spec(true, 5, LayerKind::kTrl), 7);
  Network b(small_trl_spec(true, 5, LayerKind::kTrl), 7);
  Network c(small_trl_spec(true, 5, LayerKind::kTrl), 8);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    EXPECT_EQ(a.parameters()[i].value, b.parameters()[i].value);
    any_diff |= !(a.parameters()[i].value == c.parameters()[i].value);
  }
  EXPECT_TRUE(any_diff);
}

TEST(Network, DistributionalQValuesAreExpectations) {
  Network net(small_trl_spec(true, 5, LayerKind::kDense), 51);
  std::mt19937_64 rng(52);
  const DenseTensor x = batched_input(net.spec(), 2, rng);
  Tape t;
  const auto probs = softmax_last(t.value(net.forward(t, x).output));
  const auto q = net.q_values(x);
  const auto support = net.spec().head.support();
  ASSERT_EQ(support.front(), -2.0);
  ASSERT_EQ(support.back(), 2.0);
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    double mass = 0.0;
    for (std::size_t z = 0; z < 5; ++z) {
      s += probs[i * 5 + z] * support[z];
      mass += probs[i * 5 + z];
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(q[i], s, 1e-12);
  }
}

TEST(Network, RejectsMismatchedInput) {
  Network net(small_trl_spec(false, 1, LayerKind::kDense), 1);
  Tape t;
  EXPECT_THROW(net.forward(t, DenseTensor({1, 2, 5, 6})), std::invalid_argument);
}

TEST(Checkpoint, RoundTripRestoresOutputsExactly) {
  const auto dir = std::filesystem::temp_directory_path() / "tenrl_ckpt_roundtrip";
  std::filesystem::remove_all(dir);
  Network net(small_trl_spec(true, 5, LayerKind::kTrl), 61);
  save_checkpoint(net, dir, nlohmann::json{{"note", "x"}});
  Network loaded = load_checkpoint(dir);
  std::mt19937_64 rng(62);
  const DenseTensor x = batched_input(net.spec(), 3, rng);
  EXPECT_EQ(net.q_values(x), loaded.q_values(x));
  EXPECT_EQ(read_manifest(dir)["config"]["note"], "x");
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, ShapeMismatchIsReported) {
  const auto dir = std::filesystem::temp_directory_path() / "tenrl_ckpt_mismatch";
  std::filesystem::remove_all(dir);
  Network net(small_trl_spec(false, 1, LayerKind::kDense), 1);
  save_checkpoint(net, dir);
  auto other_spec = small_trl_spec(false, 1, LayerKind::kDense);
  other_spec.layers[2].width = 6;
  Network other(other_spec, 1);
  EXPECT_THROW(load_parameters(other, dir), CheckpointError);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, MissingDirectoryIsReported) {
  EXPECT_THROW(load_checkpoint("/nonexistent/tenrl/ckpt"), CheckpointError);
}
