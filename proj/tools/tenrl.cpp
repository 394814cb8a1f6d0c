// Command-line front end: training, evaluation, reporting and the
// stand-alone numerical tools (decomposition, scattering, optimizer bench).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tenrl/decomp.hpp"
#include "tenrl/errors.hpp"
#include "tenrl/harness/config.hpp"
#include "tenrl/harness/report.hpp"
#include "tenrl/harness/runner.hpp"
#include "tenrl/nn/network_spec.hpp"
#include "tenrl/optim/bench.hpp"
#include "tenrl/scattering.hpp"
#include "tenrl/tnsr_io.hpp"

namespace fs = std::filesystem;
using namespace tenrl;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

int cmd_train(const fs::path& config, std::uint64_t seed, const fs::path& out, bool wall_clock) {
  const auto cfg = harness::load_config(config);
  harness::RunOptions opts;
  opts.out_dir = out;
  opts.wall_clock = wall_clock;
  const auto res = harness::train_run(cfg, seed, opts);
  std::cout << cfg.name << " seed " << seed << ": headline " << res.headline << " over the final "
            << std::min(cfg.train.final_evals, res.evaluations.size()) << " evaluations";
  if (res.steps_to_threshold) std::cout << ", reached " << cfg.train.threshold << " at step " << *res.steps_to_threshold;
  std::cout << "\nwrote " << (out / "metrics.csv").string() << '\n';
  return kOk;
}

int cmd_eval(const fs::path& checkpoint, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw ConfigError("--episodes", "must be positive");
  const auto r = harness::evaluate_checkpoint(checkpoint, episodes, seed);
  std::printf("episodes %zu mean %.6f std %.6f\n", episodes, r.mean, r.stddev);
  return kOk;
}

int cmd_report(const std::vector<fs::path>& runs, const fs::path& out, const std::string& baseline,
               const std::vector<std::string>& expected) {
  const auto report = harness::compression_report(runs, baseline, expected);
  if (out.empty()) {
    harness::write_report_csv(std::cout, report);
  } else {
    std::ofstream f(out);
    harness::write_report_csv(f, report);
    std::cout << "wrote " << out.string() << '\n';
  }
  for (const auto& m : report.missing) std::cerr << "warning: no usable summary in " << m << '\n';
  return kOk;
}

int cmd_count(const fs::path& config, bool as_json) {
  const auto spec = harness::load_network_spec(config);
  const auto counts = nn::count_parameters(spec);
  const auto dense = nn::count_parameters(nn::dense_equivalent(spec));
  const double ratio = static_cast<double>(dense.linear_total) / static_cast<double>(counts.linear_total);
  if (as_json) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : counts.layers) {
      layers.push_back({{"layer", l.name}, {"kind", nn::to_string(l.kind)}, {"coefficients", l.coefficients}});
    }
    std::cout << nlohmann::json{{"layers", layers},
                                {"total", counts.total},
                                {"head", counts.linear_total},
                                {"dense_head", dense.linear_total},
                                {"dense_total", dense.total},
                                {"head_ratio", ratio}}
                     .dump(2)
              << '\n';
    return kOk;
  }
  std::printf("%-12s %-11s %12s\n", "layer", "kind", "coefficients");
  for (const auto& l : counts.layers) {
    std::printf("%-12s %-11s %12zu\n", l.name.c_str(), nn::to_string(l.kind).c_str(), l.coefficients);
  }
  std::printf("total %zu\nhead (dense + trl layers) %zu\ndense-equivalent head %zu\nhead compression %.3fx\n",
              counts.total, counts.linear_total, dense.linear_total, ratio);
  return kOk;
}

std::vector<std::size_t> parse_ranks(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long v = std::stol(item);
      if (v < 1) throw ConfigError("--ranks", "ranks must be positive");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("--ranks", "cannot parse '" + item + "'");
    }
  }
  return out;
}

int cmd_decompose(const fs::path& in, const std::string& method, std::size_t rank, const std::string& ranks_arg,
                  const std::string& prefix, std::uint64_t seed) {
  const DenseTensor x = load_tnsr(in);
  nlohmann::json summary{{"method", method}};
  std::size_t count = 0;
  double err = 0.0;
  if (method == "cp") {
    if (rank == 0) throw ConfigError("--rank", "cp needs --rank R with R >= 1");
    decomp::CPOptions opts;
    opts.seed = seed;
    const auto r = decomp::cp_als(x, rank, opts);
    save_tnsr(prefix + ".weights.tnsr", DenseTensor({rank}, r.decomposition.weights));
    for (std::size_t k = 0; k < r.decomposition.factors.size(); ++k) {
      save_tnsr(prefix + ".factor" + std::to_string(k) + ".tnsr", r.decomposition.factors[k].to_tensor());
    }
    summary["ranks"] = {rank};
    count = decomp::param_count(r.decomposition);
    err = r.rel_error;
  } else if (method == "tucker") {
    Shape ranks = ranks_arg.empty() ? Shape(x.order(), rank) : parse_ranks(ranks_arg);
    if (ranks.size() != x.order()) throw ConfigError("--ranks", "need one rank per mode");
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      if (ranks[k] < 1 || ranks[k] > x.extent(k)) {
        throw ConfigError("--ranks", "rank " + std::to_string(ranks[k]) + " for mode " + std::to_string(k) +
                                         " must lie in [1, " + std::to_string(x.extent(k)) + "]");
      }
    }
    const auto r = decomp::tucker_hooi(x, ranks);
    save_tnsr(prefix + ".core.tnsr", r.decomposition.core);
    for (std::size_t k = 0; k < r.decomposition.factors.size(); ++k) {
      save_tnsr(prefix + ".factor" + std::to_string(k) + ".tnsr", r.decomposition.factors[k].to_tensor());
    }
    summary["ranks"] = ranks;
    count = decomp::param_count(r.decomposition);
    err = r.rel_error;
  } else {
    throw ConfigError("--method", "expected cp or tucker");
  }
  summary["rel_error"] = err;
  summary["param_count"] = count;
  summary["compression_ratio"] = static_cast<double>(x.size()) / static_cast<double>(count);
  std::ofstream(prefix + ".json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int cmd_scatter(const fs::path& in, int J, int L, int order, const fs::path& out) {
  const DenseTensor x = load_tnsr(in);
  if (x.order() != 2 && x.order() != 3) throw ConfigError("--in", "expected an (H, W) or (C, H, W) tensor");
  const std::size_t h = x.extent(x.order() - 2);
  const std::size_t w = x.extent(x.order() - 1);
  scattering::ScatteringConfig cfg{J, L, order, h, w};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--J", e.what());
  }
  const auto bank = scattering::build_filter_bank(cfg);
  const auto s = scattering::scatter(x, bank);
  save_tnsr(out, s.coefficients);
  const fs::path sidecar = out.string() + ".paths.json";
  std::ofstream(sidecar) << scattering::path_table_json(s.paths) << '\n';
  std::cout << "wrote " << out.string() << " (" << s.coefficients.extent(0) << " channels) and " << sidecar.string()
            << '\n';
  return kOk;
}

int cmd_bench(std::size_t dim_a, std::size_t dim_b, std::size_t steps, std::uint64_t seed, const fs::path& out) {
  optim::BenchOptions opts;
  opts.dim_a = dim_a;
  opts.dim_b = dim_b;
  opts.steps = steps;
  opts.seed = seed;
  const auto rows = optim::run_optimizer_bench(opts);
  std::ofstream f(out);
  f << "step,sgd,adam,kfac\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", r.step, r.sgd, r.adam, r.kfac);
    f << buf;
  }
  const auto& last = rows.back();
  std::printf("after %zu steps: sgd %.3g adam %.3g kfac %.3g\n", last.step, last.sgd, last.adam, last.kfac);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-factored deep Q-learning toolkit"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train one agent and write metrics, summary and checkpoint");
  fs::path train_config, train_out;
  std::uint64_t train_seed = 0;
  bool wall_clock = false;
  train->add_option("--config", train_config, "Run configuration (JSON)")->required();
  train->add_option("--seed", train_seed, "Random seed");
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_flag("--wall-clock", wall_clock, "Record real elapsed seconds in metrics.csv");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  fs::path eval_ckpt;
  std::size_t eval_episodes = 100;
  std::uint64_t eval_seed = 1234;
  eval->add_option("--checkpoint", eval_ckpt, "Run or checkpoint directory")->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes");
  eval->add_option("--seed", eval_seed, "Evaluation seed");

  auto* report = app.add_subcommand("report", "Tabulate runs by variant");
  std::vector<fs::path> report_runs;
  fs::path report_out;
  std::string baseline = "dense";
  std::vector<std::string> expected;
  report->add_option("--runs", report_runs, "Run directories")->required();
  report->add_option("--out", report_out, "CSV output (stdout when omitted)");
  report->add_option("--baseline", baseline, "Variant used to normalize scores");
  report->add_option("--expect", expected, "Variants that must be present");

  auto* count = app.add_subcommand("count-params", "Per-layer coefficient counts");
  fs::path count_config;
  bool count_json = false;
  count->add_option("--config", count_config, "Configuration with a network section")->required();
  count->add_flag("--json", count_json, "Emit JSON");

  auto* decompose = app.add_subcommand("decompose", "CP or Tucker decomposition of a TNSR tensor");
  fs::path dec_in;
  std::string dec_method, dec_ranks, dec_out;
  std::size_t dec_rank = 0;
  std::uint64_t dec_seed = 0;
  decompose->add_option("--in", dec_in, "Input tensor")->required();
  decompose->add_option("--method", dec_method, "cp or tucker")->required();
  decompose->add_option("--rank", dec_rank, "CP rank, or a uniform Tucker rank");
  decompose->add_option("--ranks", dec_ranks, "Tucker ranks R1,..,RN");
  decompose->add_option("--out", dec_out, "Output prefix")->required();
  decompose->add_option("--seed", dec_seed, "CP initialization seed");

  auto* scat = app.add_subcommand("scatter", "Wavelet scattering coefficients of an image");
  fs::path sc_in, sc_out;
  int sc_j = 3, sc_l = 8, sc_order = 2;
  scat->add_option("--in", sc_in, "Input (H, W) or (C, H, W) tensor")->required();
  scat->add_option("--J", sc_j, "Maximum log-scale");
  scat->add_option("--L", sc_l, "Orientations");
  scat->add_option("--order", sc_order, "Maximum order (0, 1 or 2)");
  scat->add_option("--out", sc_out, "Output tensor")->required();

  auto* bench = app.add_subcommand("bench-optim", "SGD, Adam and K-FAC on a Kronecker-structured quadratic");
  std::size_t dim_a = 8, dim_b = 8, bench_steps = 100;
  std::uint64_t bench_seed = 0;
  fs::path bench_out = "bench.csv";
  bench->add_option("--dim-a", dim_a, "Input-side factor dimension");
  bench->add_option("--dim-b", dim_b, "Output-side factor dimension");
  bench->add_option("--steps", bench_steps, "Iterations");
  bench->add_option("--seed", bench_seed, "Problem seed");
  bench->add_option("--out", bench_out, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*train) return cmd_train(train_config, train_seed, train_out, wall_clock);
    if (*eval) return cmd_eval(eval_ckpt, eval_episodes, eval_seed);
    if (*report) return cmd_report(report_runs, report_out, baseline, expected);
    if (*count) return cmd_count(count_config, count_json);
    if (*decompose) return cmd_decompose(dec_in, dec_method, dec_rank, dec_ranks, dec_out, dec_seed);
    if (*scat) return cmd_scatter(sc_in, sc_j, sc_l, sc_order, sc_out);
    if (*bench) return cmd_bench(dim_a, dim_b, bench_steps, bench_seed, bench_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
