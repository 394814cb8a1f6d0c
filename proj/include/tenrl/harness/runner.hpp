#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tenrl/harness/config.hpp"
#include "tenrl/nn/network.hpp"

namespace tenrl::harness {

struct EpisodeRecord {
  std::size_t step = 0;
  std::size_t episode = 0;
  double ret = 0.0;
  std::size_t length = 0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  double elapsed_s = 0.0;
};

struct EvalRecord {
  std::size_t step = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct RunResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<EvalRecord> evaluations;
  double headline = 0.0;                          // mean of the final scheduled evaluations
  std::optional<std::size_t> steps_to_threshold;  // first evaluation reaching train.threshold
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::shared_ptr<nn::Network> network;  // online network after the last update
};

struct RunOptions {
  /// Output directory for metrics.csv, evals.csv, summary.json and the
  /// checkpoint; empty keeps everything in memory.
  std::filesystem::path out_dir;
  /// Record real elapsed time in metrics.csv. Off by default so repeated runs
  /// produce byte-identical files; wall time always goes to timing.json.
  bool wall_clock = false;
};

/// Trains one agent. Deterministic for a given config and seed.
RunResult train_run(const RunConfig& cfg, std::uint64_t seed, const RunOptions& opts = {});

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  std::vector<double> returns;
};

/// Runs `episodes` episodes with ε-greedy (ε = `epsilon`) actions from `net`
/// on a fresh environment seeded with `seed`.
EvalResult evaluate(nn::Network& net, const EnvConfig& env, std::size_t episodes, double epsilon, std::uint64_t seed);

/// Loads a checkpoint written by train_run and evaluates it with the
/// configuration stored alongside it.
EvalResult evaluate_checkpoint(const std::filesystem::path& dir, std::size_t episodes, std::uint64_t seed = 1234);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpisodeRecord>& rows);

}  // namespace tenrl::harness
