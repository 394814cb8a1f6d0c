#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tenrl::harness {

struct RunSummary {
  std::string name;
  unsigned long long seed = 0;
  double headline = 0.0;
  std::size_t params = 0;
  std::size_t head_params = 0;
  double ratio = 1.0;
  std::optional<std::size_t> steps_to_threshold;
};

struct VariantRow {
  std::string variant;
  std::size_t params = 0;
  std::size_t head_params = 0;
  double ratio = 0.0;
  std::vector<unsigned long long> seeds;
  std::vector<double> scores;
  double mean = 0.0;
  double stddev = 0.0;                        // population, across seeds
  std::optional<double> relative;             // mean / dense mean
  std::optional<double> median_steps_to_threshold;
  std::size_t runs_below_threshold = 0;       // runs that never reached it
  std::vector<std::string> notes;
};

struct CompressionReport {
  std::vector<VariantRow> rows;
  std::vector<std::string> missing;  // run directories without a usable summary
  std::optional<double> mean_relative;  // average relative score of the non-dense variants
};

RunSummary read_run_summary(const std::filesystem::path& run_dir);

/// Groups runs by variant name. The variant called `baseline` normalizes
/// every other score; `expected` lists variants that must appear (missing
/// ones are flagged with an empty row).
CompressionReport compression_report(const std::vector<std::filesystem::path>& run_dirs,
                                     const std::string& baseline = "dense",
                                     const std::vector<std::string>& expected = {});

void write_report_csv(std::ostream& out, const CompressionReport& report);

}  // namespace tenrl::harness
