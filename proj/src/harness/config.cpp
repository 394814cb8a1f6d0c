#include "tenrl/harness/config.hpp"

#include <fstream>

#include "tenrl/json_fields.hpp"
#include "tenrl/nn/spec_json.hpp"

namespace tenrl::harness {

namespace {

EnvConfig parse_env(const nlohmann::json& j) {
  ObjectReader r(j, "env");
  EnvConfig e;
  e.name = r.require<std::string>("name");
  if (e.name == "catch") {
    e.grid = r.get<std::size_t>("grid", e.grid);
    e.frame_stack = r.get<std::size_t>("frame_stack", e.frame_stack);
    if (e.grid < 3) throw ConfigError("env.grid", "must be at least 3");
    if (e.frame_stack == 0) throw ConfigError("env.frame_stack", "must be positive");
  } else if (e.name == "chain") {
    e.states = r.get<std::size_t>("states", e.states);
    e.max_steps = r.get<std::size_t>("max_steps", e.max_steps);
    if (e.states < 2) throw ConfigError("env.states", "must be at least 2");
    if (e.max_steps == 0) throw ConfigError("env.max_steps", "must be positive");
  } else {
    throw ConfigError("env.name", "unknown environment '" + e.name + "' (expected catch or chain)");
  }
  r.finish();
  return e;
}

rl::AgentConfig parse_agent(const nlohmann::json& j) {
  ObjectReader r(j, "agent");
  rl::AgentConfig a;
  a.gamma = r.get("gamma", a.gamma);
  a.n_step = r.get("n_step", a.n_step);
  a.batch_size = r.get("batch_size", a.batch_size);
  a.target_period = r.get("target_period", a.target_period);
  a.min_replay = r.get("min_replay", a.min_replay);
  a.replay_capacity = r.get("replay_capacity", a.replay_capacity);
  a.update_period = r.get("update_period", a.update_period);
  a.alpha = r.get("alpha", a.alpha);
  a.beta_start = r.get("beta_start", a.beta_start);
  a.beta_end = r.get("beta_end", a.beta_end);
  a.epsilon_start = r.get("epsilon_start", a.epsilon_start);
  a.epsilon_end = r.get("epsilon_end", a.epsilon_end);
  a.epsilon_fraction = r.get("epsilon_fraction", a.epsilon_fraction);
  a.eval_epsilon = r.get("eval_epsilon", a.eval_epsilon);
  a.huber = r.get("huber", a.huber);
  r.finish();
  a.validate();
  return a;
}

optim::OptimConfig parse_optim(const nlohmann::json& j) {
  ObjectReader r(j, "optim");
  optim::OptimConfig o;
  const auto method = r.get<std::string>("method", "adam");
  if (method == "adam") {
    o.method = optim::Method::kAdam;
  } else if (method == "kfac") {
    o.method = optim::Method::kKfac;
  } else {
    throw ConfigError("optim.method", "expected adam or kfac");
  }
  o.adam.lr = r.get("lr", o.adam.lr);
  o.adam.beta1 = r.get("beta1", o.adam.beta1);
  o.adam.beta2 = r.get("beta2", o.adam.beta2);
  o.adam.eps = r.get("eps", o.adam.eps);
  o.max_grad_norm = r.get("max_grad_norm", o.max_grad_norm);
  if (r.has("kfac")) {
    ObjectReader k(r.child("kfac"), "optim.kfac");
    o.kfac.lr = k.get("lr", o.kfac.lr);
    o.kfac.damping = k.get("damping", o.kfac.damping);
    o.kfac.stat_decay = k.get("stat_decay", o.kfac.stat_decay);
    o.kfac.inverse_period = k.get("inverse_period", o.kfac.inverse_period);
    o.kfac.max_update_norm = k.get("max_update_norm", o.kfac.max_update_norm);
    k.finish();
  }
  r.finish();
  o.validate();
  return o;
}

TrainConfig parse_train(const nlohmann::json& j) {
  ObjectReader r(j, "train");
  TrainConfig t;
  t.steps = r.get("steps", t.steps);
  t.eval_every = r.get("eval_every", t.eval_every);
  t.eval_episodes = r.get("eval_episodes", t.eval_episodes);
  t.final_evals = r.get("final_evals", t.final_evals);
  t.threshold = r.get("threshold", t.threshold);
  t.checkpoint = r.get("checkpoint", t.checkpoint);
  r.finish();
  if (t.steps == 0) throw ConfigError("train.steps", "must be positive");
  if (t.eval_every == 0) throw ConfigError("train.eval_every", "must be positive");
  if (t.eval_episodes == 0) throw ConfigError("train.eval_episodes", "must be positive");
  if (t.final_evals == 0) throw ConfigError("train.final_evals", "must be positive");
  return t;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  ObjectReader r(j, "");
  RunConfig c;
  c.raw = j;
  c.name = r.get<std::string>("name", "run");
  c.env = parse_env(r.child("env"));
  c.network = nn::network_spec_from_json(r.child("network"), "network");
  c.agent = r.has("agent") ? parse_agent(r.child("agent")) : rl::AgentConfig{};
  c.optim = r.has("optim") ? parse_optim(r.child("optim")) : optim::OptimConfig{};
  c.train = r.has("train") ? parse_train(r.child("train")) : TrainConfig{};
  r.finish();
  if (!r.has("agent")) c.agent.validate();

  const auto resolved = nn::resolve(c.network);
  auto env = make_env(c.env, 0);
  if (env->observation_shape() != c.network.input_shape) {
    throw ConfigError("network.input_shape", "does not match the environment observation shape");
  }
  if (env->num_actions() != c.network.head.actions) {
    throw ConfigError("network.head.actions",
                      "environment has " + std::to_string(env->num_actions()) + " actions");
  }
  return c;
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

nn::NetworkSpec load_network_spec(const std::filesystem::path& path) {
  const auto j = read_json(path);
  if (!j.is_object() || !j.contains("network")) throw ConfigError("network", "missing required field");
  auto spec = nn::network_spec_from_json(j.at("network"), "network");
  nn::resolve(spec);
  return spec;
}

std::unique_ptr<Environment> make_env(const EnvConfig& cfg, std::uint64_t seed) {
  if (cfg.name == "catch") return std::make_unique<CatchEnv>(cfg.grid, cfg.frame_stack, seed);
  if (cfg.name == "chain") return std::make_unique<ChainMdp>(cfg.states, cfg.max_steps);
  throw ConfigError("env.name", "unknown environment '" + cfg.name + "'");
}

}  // namespace tenrl::harness
