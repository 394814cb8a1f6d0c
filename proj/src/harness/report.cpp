#include "tenrl/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

namespace tenrl::harness {

namespace fs = std::filesystem;

RunSummary read_run_summary(const fs::path& run_dir) {
  std::ifstream in(run_dir / "summary.json");
  if (!in) throw std::runtime_error("no summary.json in " + run_dir.string());
  const auto j = nlohmann::json::parse(in);
  RunSummary s;
  s.name = j.at("name").get<std::string>();
  s.seed = j.at("seed").get<unsigned long long>();
  s.headline = j.at("headline").get<double>();
  s.params = j.at("params").get<std::size_t>();
  s.head_params = j.at("head_params").get<std::size_t>();
  s.ratio = j.at("compression_ratio").get<double>();
  if (j.contains("steps_to_threshold") && !j.at("steps_to_threshold").is_null()) {
    s.steps_to_threshold = j.at("steps_to_threshold").get<std::size_t>();
  }
  return s;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + f(v[i]);
  return s;
}

}  // namespace

CompressionReport compression_report(const std::vector<fs::path>& run_dirs, const std::string& baseline,
                                     const std::vector<std::string>& expected) {
  CompressionReport report;
  std::map<std::string, std::vector<RunSummary>> groups;
  std::vector<std::string> order;
  for (const auto& dir : run_dirs) {
    try {
      auto s = read_run_summary(dir);
      if (!groups.count(s.name)) order.push_back(s.name);
      groups[s.name].push_back(std::move(s));
    } catch (const std::exception&) {
      report.missing.push_back(dir.string());
    }
  }
  for (const auto& name : expected)
    if (!groups.count(name)) order.push_back(name);

  for (const auto& name : order) {
    VariantRow row;
    row.variant = name;
    auto it = groups.find(name);
    if (it == groups.end()) {
      row.notes.push_back("missing: no runs found");
      report.rows.push_back(std::move(row));
      continue;
    }
    auto runs = it->second;
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    row.params = runs.front().params;
    row.head_params = runs.front().head_params;
    row.ratio = runs.front().ratio;
    std::vector<double> steps;
    for (const auto& r : runs) {
      row.seeds.push_back(r.seed);
      row.scores.push_back(r.headline);
      if (r.steps_to_threshold) {
        steps.push_back(static_cast<double>(*r.steps_to_threshold));
      } else {
        steps.push_back(INFINITY);
        ++row.runs_below_threshold;
      }
    }
    double sum = 0.0;
    for (double s : row.scores) sum += s;
    row.mean = sum / static_cast<double>(row.scores.size());
    double var = 0.0;
    for (double s : row.scores) var += (s - row.mean) * (s - row.mean);
    row.stddev = std::sqrt(var / static_cast<double>(row.scores.size()));
    // Runs that never reached the threshold count as infinitely slow.
    if (const double m = median(steps); std::isfinite(m)) row.median_steps_to_threshold = m;
    if (row.runs_below_threshold > 0) {
      row.notes.push_back(std::to_string(row.runs_below_threshold) + " run(s) never reached the threshold");
    }
    report.rows.push_back(std::move(row));
  }

  const VariantRow* base = nullptr;
  for (const auto& r : report.rows)
    if (r.variant == baseline && !r.scores.empty()) base = &r;
  if (base && base->mean != 0.0) {
    double rel_sum = 0.0;
    std::size_t rel_n = 0;
    for (auto& r : report.rows) {
      if (r.scores.empty()) continue;
      r.relative = r.mean / base->mean;
      if (r.variant != baseline) {
        rel_sum += *r.relative;
        ++rel_n;
      }
    }
    if (rel_n) report.mean_relative = rel_sum / static_cast<double>(rel_n);
  }
  return report;
}

void write_report_csv(std::ostream& out, const CompressionReport& report) {
  out << "variant,params,head_params,ratio,seeds,scores,mean,std,relative_pct,median_steps_to_threshold,notes\n";
  for (const auto& r : report.rows) {
    out << r.variant << ',' << r.params << ',' << r.head_params << ',' << (r.scores.empty() ? "" : fmt(r.ratio)) << ','
        << join(r.seeds, [](auto s) { return std::to_string(s); }) << ','
        << join(r.scores, [](double s) { return fmt(s); }) << ',' << (r.scores.empty() ? "" : fmt(r.mean)) << ','
        << (r.scores.empty() ? "" : fmt(r.stddev)) << ',' << (r.relative ? fmt(100.0 * *r.relative) : "") << ','
        << (r.median_steps_to_threshold ? fmt(*r.median_steps_to_threshold) : "") << ','
        << join(r.notes, [](const std::string& s) { return s; }) << '\n';
  }
  for (const auto& m : report.missing) out << "missing_run,,,,,,,,,," << m << '\n';
  out << "relative_to_baseline,,,,,,,," << (report.mean_relative ? fmt(100.0 * *report.mean_relative) : "")
      << ",,mean relative score of compressed variants\n";
}

}  // namespace tenrl::harness
