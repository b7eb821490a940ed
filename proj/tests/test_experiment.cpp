#include "skts/experiment.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace skts;
using namespace skts::testing;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.scenario = "synthetic";
  cfg.algorithms = {"oracle-ks", "skts"};
  cfg.snr_db = {20.0};
  cfg.trials = 2;
  cfg.seed = 77;
  cfg.synthetic.signal_dim = 16;
  cfg.synthetic.meas_dim = 8;
  cfg.synthetic.sparsity = 2;
  cfg.synthetic.block_len = 5;
  cfg.synthetic.num_blocks = 2;
  return cfg;
}

std::string csv_string(const std::vector<ResultRow>& rows) {
  const std::string path = "test_experiment_tmp.csv";
  write_csv(path, rows);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("compute_mse_db examples") {
  std::vector<Vec> truth{Vec(2)};
  truth[0] << 1.0, 0.0;
  std::vector<Vec> zero{Vec::Zero(2)};
  CHECK(compute_mse_db(truth, zero) == doctest::Approx(0.0));
  CHECK(compute_mse_db(truth, truth) == doctest::Approx(-200.0));
  std::vector<Vec> close{Vec(2)};
  close[0] << 0.9, 0.0;
  CHECK(compute_mse_db(truth, close) == doctest::Approx(-20.0));

  CHECK_THROWS_AS(compute_mse_db({Vec::Zero(2)}, zero), std::invalid_argument);
  CHECK_THROWS_AS(compute_mse_db(truth, {}), std::invalid_argument);
}

TEST_CASE("config parsing round trip") {
  std::stringstream in(R"(
# comment
[experiment]
scenario = synthetic
algorithms = skts, omp
snr_db = 10, 20, 30
trials = 3
seed = 42
output = out.csv

[synthetic]
signal_dim = 50
meas_dim = 10
sparsity = 4
ar_coeff = 0.5
b_mode = fixed

[skts]
tree_width = 7
schedule = 8, 4
)");
  ExperimentConfig cfg = parse_config(in);
  CHECK(cfg.scenario == "synthetic");
  CHECK(cfg.algorithms == std::vector<std::string>{"skts", "omp"});
  CHECK(cfg.snr_db == std::vector<double>{10.0, 20.0, 30.0});
  CHECK(cfg.trials == 3);
  CHECK(cfg.seed == 42);
  CHECK(cfg.output == "out.csv");
  CHECK(cfg.synthetic.signal_dim == 50);
  CHECK(cfg.synthetic.ar_coeff == doctest::Approx(0.5));
  CHECK(cfg.synthetic.b_mode == SyntheticConfig::BMode::kFixedPerBlock);
  CHECK(cfg.tree_width == 7);
  CHECK(cfg.schedule == std::vector<int>{8, 4});
}

TEST_CASE("config errors") {
  std::stringstream unknown("[experiment]\nbogus = 1\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::stringstream bad_scenario("[experiment]\nscenario = quantum\n");
  CHECK_THROWS_AS(parse_config(bad_scenario), ConfigError);
  std::stringstream bad_bmode("[synthetic]\nb_mode = sideways\n");
  CHECK_THROWS_AS(parse_config(bad_bmode), ConfigError);
  std::stringstream bad_algo("[experiment]\nalgorithms = skts, magic\n");
  CHECK_THROWS_AS(parse_config(bad_algo), ConfigError);
  std::stringstream malformed("[experiment]\nno equals sign here\n");
  CHECK_THROWS_AS(parse_config(malformed), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.ini"), ConfigError);
}

TEST_CASE("row-count contract for a single-algorithm run") {
  ExperimentConfig cfg = small_config();
  cfg.algorithms = {"oracle-ks"};
  cfg.trials = 1;
  ExperimentResult result = run_experiment(cfg);
  CHECK(static_cast<int>(result.rows.size()) == cfg.synthetic.num_blocks);
  CHECK(result.failures == 0);
  for (const auto& row : result.rows) {
    CHECK(row.algorithm == "oracle-ks");
    CHECK(row.support_recovered);  // oracle knows the support by construction
    CHECK(row.mse_db < 0.0);
  }
}

TEST_CASE("same seed twice gives a byte-identical CSV") {
  ExperimentConfig cfg = small_config();
  ExperimentResult a = run_experiment(cfg);
  ExperimentResult b = run_experiment(cfg);
  CHECK(csv_string(a.rows) == csv_string(b.rows));

  cfg.seed = 78;
  ExperimentResult c = run_experiment(cfg);
  CHECK(csv_string(a.rows) != csv_string(c.rows));
}

TEST_CASE("parallel execution matches the serial row order") {
  ExperimentConfig cfg = small_config();
  cfg.snr_db = {10.0, 20.0};
  ExperimentResult serial = run_experiment(cfg);
  cfg.parallelism = 4;
  ExperimentResult parallel = run_experiment(cfg);
  CHECK(csv_string(serial.rows) == csv_string(parallel.rows));
}

TEST_CASE("all algorithms run on every scenario cell") {
  ExperimentConfig cfg = small_config();
  cfg.algorithms = {"skts", "conventional-ks", "oracle-ks", "omp", "rt-skts"};
  cfg.trials = 1;
  cfg.rt.warmup_len = 2;
  ExperimentResult result = run_experiment(cfg);
  CHECK(result.failures == 0);
  CHECK(result.rows.size() == cfg.algorithms.size() * cfg.synthetic.num_blocks);
  // Deterministic (snr, trial, block, algorithm) order: algorithms cycle fastest.
  for (size_t i = 0; i < result.rows.size(); ++i) {
    CHECK(result.rows[i].algorithm == cfg.algorithms[i % cfg.algorithms.size()]);
    CHECK(result.rows[i].block == static_cast<int>(i / cfg.algorithms.size()));
  }
}

TEST_CASE("csv header and formatting") {
  ResultRow row;
  row.scenario = "synthetic";
  row.algorithm = "skts";
  row.snr_db = 20.0;
  row.trial = 1;
  row.block = 0;
  row.mse_db = -12.3456789;
  row.support_recovered = true;
  row.runtime_ms = 0.0;
  const std::string text = csv_string({row});
  CHECK(text ==
        "scenario,algorithm,snr_db,trial,block,mse_db,support_recovered,runtime_ms\n"
        "synthetic,skts,20,1,0,-12.3457,1,0\n");
}
