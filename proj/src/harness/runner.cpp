#include "tenrl/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tenrl/errors.hpp"
#include "tenrl/nn/checkpoint.hpp"
#include "tenrl/rl/agent.hpp"
#include "tenrl/rl/targets.hpp"

namespace tenrl::harness {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_row(const EpisodeRecord& r) {
  return std::to_string(r.step) + "," + std::to_string(r.episode) + "," + fmt(r.ret) + "," +
         std::to_string(r.length) + "," + fmt(r.mean_loss) + "," + fmt(r.epsilon) + "," + fmt(r.beta) + "," +
         fmt(r.elapsed_s);
}

constexpr const char* kCsvHeader = "step,episode,return,length,mean_loss,epsilon,beta,elapsed_s";

std::uint64_t eval_seed_for(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x5EED; }

DenseTensor batch_of_one(const DenseTensor& obs) {
  Shape s{1};
  s.insert(s.end(), obs.shape().begin(), obs.shape().end());
  return obs.reshaped(s);
}

}  // namespace

void write_metrics_csv(const fs::path& path, const std::vector<EpisodeRecord>& rows) {
  std::ofstream out(path);
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

EvalResult evaluate(nn::Network& net, const EnvConfig& env_cfg, std::size_t episodes, double epsilon,
                    std::uint64_t seed) {
  if (episodes == 0) throw std::invalid_argument("evaluate: episodes must be positive");
  auto env = make_env(env_cfg, seed);
  std::mt19937_64 rng(seed ^ 0xA5A5A5A5ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(env->num_actions()) - 1);
  EvalResult res;
  for (std::size_t e = 0; e < episodes; ++e) {
    DenseTensor obs = env->reset();
    double ret = 0.0;
    while (true) {
      int action;
      if (unit(rng) < epsilon) {
        action = pick(rng);
      } else {
        const DenseTensor q = net.q_values(net.preprocess(batch_of_one(obs)));
        action = static_cast<int>(rl::argmax(q.data()));
      }
      auto s = env->step(action);
      ret += s.reward;
      obs = std::move(s.observation);
      if (s.done || s.truncated) break;
    }
    res.returns.push_back(ret);
  }
  double sum = 0.0;
  for (double r : res.returns) sum += r;
  res.mean = sum / static_cast<double>(episodes);
  double var = 0.0;
  for (double r : res.returns) var += (r - res.mean) * (r - res.mean);
  res.stddev = std::sqrt(var / static_cast<double>(episodes));
  return res;
}

RunResult train_run(const RunConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  rl::Agent agent(cfg.network, cfg.agent, cfg.optim, seed);
  auto env = make_env(cfg.env, seed);
  const std::uint64_t eval_seed = eval_seed_for(seed);

  std::ofstream csv;
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    csv.open(opts.out_dir / "metrics.csv");
    if (!csv) throw std::runtime_error("cannot write " + (opts.out_dir / "metrics.csv").string());
    csv << kCsvHeader << '\n';
  }

  RunResult result;
  result.seed = seed;
  const std::size_t total = cfg.train.steps;
  std::vector<float> features = agent.featurize(env->reset());
  double ep_return = 0.0;
  std::size_t ep_length = 0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  std::size_t episode = 0;

  for (std::size_t step = 1; step <= total; ++step) {
    const double eps = agent.epsilon_at(step - 1, total);
    const double beta = agent.beta_at(step - 1, total);
    const int action = agent.act(features, eps);
    auto s = env->step(action);
    std::vector<float> next = agent.featurize(s.observation);
    agent.observe(features, action, s.reward, next, s.done, s.truncated);
    ep_return += s.reward;
    ++ep_length;

    if (agent.ready() && step % cfg.agent.update_period == 0) {
      const auto stats = agent.learn(beta);
      loss_sum += stats.loss;
      ++loss_count;
    }

    if (s.done || s.truncated) {
      EpisodeRecord rec{step,
                        episode++,
                        ep_return,
                        ep_length,
                        loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0,
                        eps,
                        beta,
                        opts.wall_clock ? seconds() : 0.0};
      if (csv.is_open()) csv << csv_row(rec) << '\n';
      result.episodes.push_back(rec);
      ep_return = 0.0;
      ep_length = 0;
      loss_sum = 0.0;
      loss_count = 0;
      features = agent.featurize(env->reset());
    } else {
      features = std::move(next);
    }

    if (step % cfg.train.eval_every == 0 || step == total) {
      if (!result.evaluations.empty() && result.evaluations.back().step == step) continue;
      const auto ev = evaluate(agent.online(), cfg.env, cfg.train.eval_episodes, cfg.agent.eval_epsilon, eval_seed);
      result.evaluations.push_back({step, ev.mean, ev.stddev});
      if (!result.steps_to_threshold && ev.mean >= cfg.train.threshold) result.steps_to_threshold = step;
    }
  }

  const std::size_t k = std::min(cfg.train.final_evals, result.evaluations.size());
  double head = 0.0;
  for (std::size_t i = result.evaluations.size() - k; i < result.evaluations.size(); ++i) {
    head += result.evaluations[i].mean;
  }
  result.headline = k ? head / static_cast<double>(k) : 0.0;
  result.network = std::make_shared<nn::Network>(agent.online());
  result.wall_seconds = seconds();

  if (!opts.out_dir.empty()) {
    csv.close();
    {
      std::ofstream ev(opts.out_dir / "evals.csv");
      ev << "step,mean_return,std_return\n";
      for (const auto& e : result.evaluations) ev << e.step << ',' << fmt(e.mean) << ',' << fmt(e.stddev) << '\n';
    }
    const auto counts = nn::count_parameters(cfg.network);
    const auto dense = nn::count_parameters(nn::dense_equivalent(cfg.network));
    nlohmann::json summary{
        {"name", cfg.name},
        {"seed", seed},
        {"steps", total},
        {"episodes", result.episodes.size()},
        {"headline", result.headline},
        {"params", counts.total},
        {"head_params", counts.linear_total},
        {"dense_head_params", dense.linear_total},
        {"compression_ratio", static_cast<double>(dense.linear_total) / static_cast<double>(counts.linear_total)},
        {"threshold", cfg.train.threshold},
        {"steps_to_threshold", result.steps_to_threshold ? nlohmann::json(*result.steps_to_threshold) : nlohmann::json()},
    };
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& e : result.evaluations) evals.push_back({{"step", e.step}, {"mean", e.mean}, {"std", e.stddev}});
    summary["evaluations"] = evals;
    std::ofstream(opts.out_dir / "summary.json") << summary.dump(2) << '\n';
    std::ofstream(opts.out_dir / "timing.json") << nlohmann::json{{"wall_seconds", result.wall_seconds}}.dump(2) << '\n';
    if (cfg.train.checkpoint) nn::save_checkpoint(agent.online(), opts.out_dir / "checkpoint", cfg.raw);
  }
  return result;
}

EvalResult evaluate_checkpoint(const fs::path& dir, std::size_t episodes, std::uint64_t seed) {
  fs::path ckpt = dir;
  if (!fs::exists(ckpt / "manifest.json") && fs::exists(dir / "checkpoint" / "manifest.json")) ckpt = dir / "checkpoint";
  const auto manifest = nn::read_manifest(ckpt);
  if (!manifest.contains("config")) throw CheckpointError("checkpoint carries no run configuration");
  const RunConfig cfg = parse_config(manifest.at("config"));
  nn::Network net(cfg.network, 0);
  nn::load_parameters(net, ckpt);
  return evaluate(net, cfg.env, episodes, cfg.agent.eval_epsilon, seed);
}

}  // namespace tenrl::harness
