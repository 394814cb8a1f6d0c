#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "tenrl/harness/envs.hpp"
#include "tenrl/nn/network_spec.hpp"
#include "tenrl/optim/optimizer.hpp"
#include "tenrl/rl/agent.hpp"

namespace tenrl::harness {

struct EnvConfig {
  std::string name = "catch";  // "catch" or "chain"
  std::size_t grid = 24;
  std::size_t frame_stack = 2;
  std::size_t states = 8;
  std::size_t max_steps = 100;
};

struct TrainConfig {
  std::size_t steps = 20000;
  std::size_t eval_every = 2000;
  std::size_t eval_episodes = 20;
  std::size_t final_evals = 3;       // headline = mean of the last this-many evaluations
  double threshold = 0.5;            // eval return used for steps-to-threshold
  bool checkpoint = true;
};

struct RunConfig {
  std::string name;  // variant label used by `report`
  EnvConfig env;
  nn::NetworkSpec network;
  rl::AgentConfig agent;
  optim::OptimConfig optim;
  TrainConfig train;
  nlohmann::json raw;  // the document as loaded
};

/// Parses and validates a run configuration; unknown keys are rejected and
/// every error names the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Reads only the "network" section of a config file (the Atari-shaped
/// presets carry nothing else).
nn::NetworkSpec load_network_spec(const std::filesystem::path& path);

/// Environment instance described by the config, seeded for one run.
std::unique_ptr<Environment> make_env(const EnvConfig& cfg, std::uint64_t seed);

}  // namespace tenrl::harness
