/// @file experiment.hpp Monte Carlo experiment runner: config parsing, SNR
/// sweeps over algorithms, MSE metric, CSV output.

#pragma once

#include "skts/em.hpp"
#include "skts/realtime.hpp"
#include "skts/scenarios.hpp"
#include "skts/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace skts {

/// Invalid or unreadable configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string scenario = "synthetic";  // synthetic | ofdm | sc
  std::vector<std::string> algorithms{"skts"};
  std::vector<double> snr_db{20.0};
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output = "results.csv";
  int parallelism = 1;
  /// Wall-clock timing per row. Off by default so that re-runs with the same
  /// seed write byte-identical CSVs (runtime_ms is 0 unless enabled).
  bool record_timing = false;

  SyntheticConfig synthetic;
  OfdmScenario ofdm;
  ScScenario sc;

  int tree_width = 5;
  std::vector<int> schedule;  ///< empty means {2K, K} for the scenario's K
  RtConfig rt;

  void check() const;  ///< throws ConfigError
  int scenario_sparsity() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

const std::vector<std::string>& known_algorithms();

struct ResultRow {
  std::string scenario;
  std::string algorithm;
  double snr_db = 0.0;
  int trial = 0;
  int block = 0;
  double mse_db = 0.0;  ///< NaN when the algorithm failed on this row
  bool support_recovered = false;
  double runtime_ms = 0.0;
  bool failed = false;
};

/// Normalized block MSE in dB, clamped at -200 dB for exact recovery.
double compute_mse_db(const std::vector<Vec>& truth, const std::vector<Vec>& estimate);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  int failures = 0;
};

/// Runs every (snr, trial, block, algorithm) cell; all algorithms in one trial
/// see identical data. Rows come back in deterministic (snr, trial, block,
/// algorithm) order regardless of the parallelism degree.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
void print_summary(std::ostream& os, const ExperimentResult& result);

}  // namespace skts
