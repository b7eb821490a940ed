#include "skts/experiment.hpp"

#include "skts/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace skts {

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> algos{"skts", "rt-skts", "conventional-ks", "oracle-ks",
                                              "omp"};
  return algos;
}

void ExperimentConfig::check() const {
  if (scenario != "synthetic" && scenario != "ofdm" && scenario != "sc") {
    throw ConfigError("unknown scenario: " + scenario);
  }
  if (algorithms.empty()) throw ConfigError("algorithm list must be nonempty");
  for (const auto& a : algorithms) {
    if (std::find(known_algorithms().begin(), known_algorithms().end(), a) ==
        known_algorithms().end()) {
      throw ConfigError("unknown algorithm: " + a);
    }
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (snr_db.empty()) throw ConfigError("snr_db sweep must be nonempty");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (tree_width < 1) throw ConfigError("tree_width must be >= 1");
  for (size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] > schedule[i - 1]) throw ConfigError("schedule must be nonincreasing");
  }
}

int ExperimentConfig::scenario_sparsity() const {
  if (scenario == "synthetic") return synthetic.sparsity;
  if (scenario == "ofdm") return ofdm.sparsity;
  return sc.sparsity;
}

// ---------------------------------------------------------------------------
// Config parsing: INI-style key = value with [sections], '#' comments.

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": " + v);
  }
}

long parse_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    long i = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": " + v);
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  std::string line;
  std::string section = "experiment";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "experiment.scenario") cfg.scenario = value;
    else if (qual == "experiment.algorithms") cfg.algorithms = split_list(value);
    else if (qual == "experiment.snr_db") {
      cfg.snr_db.clear();
      for (const auto& v : split_list(value)) cfg.snr_db.push_back(parse_double(v, key));
    } else if (qual == "experiment.trials") cfg.trials = static_cast<int>(parse_int(value, key));
    else if (qual == "experiment.seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    else if (qual == "experiment.output") cfg.output = value;
    else if (qual == "experiment.parallelism") cfg.parallelism = static_cast<int>(parse_int(value, key));
    else if (qual == "experiment.timing") {
      if (value == "on") cfg.record_timing = true;
      else if (value == "off") cfg.record_timing = false;
      else throw ConfigError("timing must be on or off");
    }
    else if (qual == "synthetic.signal_dim") cfg.synthetic.signal_dim = static_cast<int>(parse_int(value, key));
    else if (qual == "synthetic.meas_dim") cfg.synthetic.meas_dim = static_cast<int>(parse_int(value, key));
    else if (qual == "synthetic.sparsity") cfg.synthetic.sparsity = static_cast<int>(parse_int(value, key));
    else if (qual == "synthetic.block_len") cfg.synthetic.block_len = static_cast<int>(parse_int(value, key));
    else if (qual == "synthetic.num_blocks") cfg.synthetic.num_blocks = static_cast<int>(parse_int(value, key));
    else if (qual == "synthetic.ar_coeff") cfg.synthetic.ar_coeff = parse_double(value, key);
    else if (qual == "synthetic.amplitude_var") cfg.synthetic.amplitude_var = parse_double(value, key);
    else if (qual == "synthetic.b_mode") {
      if (value == "fresh") cfg.synthetic.b_mode = SyntheticConfig::BMode::kFreshPerSnapshot;
      else if (value == "fixed") cfg.synthetic.b_mode = SyntheticConfig::BMode::kFixedPerBlock;
      else throw ConfigError("b_mode must be fresh or fixed");
    } else if (qual == "ofdm.total_subcarriers") cfg.ofdm.total_subcarriers = static_cast<int>(parse_int(value, key));
    else if (qual == "ofdm.num_pilots") cfg.ofdm.num_pilots = static_cast<int>(parse_int(value, key));
    else if (qual == "ofdm.cir_len") cfg.ofdm.cir_len = static_cast<int>(parse_int(value, key));
    else if (qual == "ofdm.block_len") cfg.ofdm.block_len = static_cast<int>(parse_int(value, key));
    else if (qual == "ofdm.sparsity") cfg.ofdm.sparsity = static_cast<int>(parse_int(value, key));
    else if (qual == "ofdm.doppler_rate") cfg.ofdm.doppler_rate = parse_double(value, key);
    else if (qual == "sc.training_len") cfg.sc.training_len = static_cast<int>(parse_int(value, key));
    else if (qual == "sc.cir_len") cfg.sc.cir_len = static_cast<int>(parse_int(value, key));
    else if (qual == "sc.sparsity") cfg.sc.sparsity = static_cast<int>(parse_int(value, key));
    else if (qual == "sc.doppler_rate") cfg.sc.doppler_rate = parse_double(value, key);
    else if (qual == "skts.tree_width") cfg.tree_width = static_cast<int>(parse_int(value, key));
    else if (qual == "skts.schedule") {
      cfg.schedule.clear();
      for (const auto& v : split_list(value)) cfg.schedule.push_back(static_cast<int>(parse_int(v, key)));
    } else if (qual == "rt.forgetting_factor") cfg.rt.forgetting_factor = parse_double(value, key);
    else if (qual == "rt.num_stages") cfg.rt.num_stages = static_cast<int>(parse_int(value, key));
    else if (qual == "rt.warmup_len") cfg.rt.warmup_len = static_cast<int>(parse_int(value, key));
    else if (qual == "rt.search_stride") cfg.rt.search_stride = static_cast<int>(parse_int(value, key));
    else throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key " + qual);
  }
  cfg.check();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

// ---------------------------------------------------------------------------

double compute_mse_db(const std::vector<Vec>& truth, const std::vector<Vec>& estimate) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("length mismatch in MSE");
  double err = 0.0;
  double energy = 0.0;
  for (size_t n = 0; n < truth.size(); ++n) {
    err += (truth[n] - estimate[n]).squaredNorm();
    energy += truth[n].squaredNorm();
  }
  if (energy <= 0.0) throw std::invalid_argument("zero-energy truth in MSE");
  if (err == 0.0) return -200.0;
  return std::max(10.0 * std::log10(err / energy), -200.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e9b5ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base, int snr_idx, int trial) {
  return splitmix64(splitmix64(base ^ (0x51a5ULL + snr_idx)) + static_cast<std::uint64_t>(trial));
}

struct TrialData {
  std::vector<BlockData> blocks;
  StateSpaceModel model;
};

TrialData generate_trial(const ExperimentConfig& cfg, double snr, std::uint64_t seed) {
  TrialData td;
  if (cfg.scenario == "synthetic") {
    SyntheticConfig sc = cfg.synthetic;
    sc.snr_db = snr;
    sc.seed = seed;
    SyntheticTrace trace = generate_synthetic(sc);
    td.blocks = std::move(trace.blocks);
    td.model = sc.model();
  } else if (cfg.scenario == "ofdm") {
    OfdmBlock blk = generate_ofdm_block(cfg.ofdm, snr, seed);
    td.model = blk.model;
    td.blocks.push_back(std::move(blk.data));
  } else {
    ScBlock blk = generate_sc_block(cfg.sc, snr, seed);
    td.model = blk.model;
    td.blocks.push_back(std::move(blk.data));
  }
  return td;
}

SignalEstimate run_algorithm(const std::string& algo, const ExperimentConfig& cfg,
                             const StateSpaceModel& model, const BlockData& data,
                             int block_index) {
  const MeasurementBlock mb = data.measurements(block_index);
  const int k = cfg.scenario_sparsity();
  if (algo == "skts") {
    SktsConfig sk;
    sk.tree_width = cfg.tree_width;
    sk.sparsity_schedule = cfg.schedule.empty() ? std::vector<int>{2 * k, k} : cfg.schedule;
    return run_skts(model, mb, sk);
  }
  if (algo == "conventional-ks") return conventional_ks(model, mb);
  if (algo == "oracle-ks") return oracle_ks(model, mb, data.support);
  if (algo == "omp") return omp_block(mb, k);
  if (algo == "rt-skts") {
    RtConfig rt = cfg.rt;
    rt.tree_width = cfg.tree_width;
    rt.sparsity = k;
    RtState state(model, rt);
    SignalEstimate est;
    for (int n = 0; n < mb.length(); ++n) {
      est.h_hat.push_back(state.step(mb.observations[n], mb.system_matrices[n]));
    }
    est.support = state.support(rt.num_stages - 2);
    return est;
  }
  throw std::invalid_argument("unknown algorithm: " + algo);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  const int num_snr = static_cast<int>(cfg.snr_db.size());
  const int cells = num_snr * cfg.trials;
  std::vector<std::vector<ResultRow>> cell_rows(cells);

  std::atomic<int> next{0};
  std::atomic<int> failures{0};
  auto worker = [&]() {
    for (int cell = next.fetch_add(1); cell < cells; cell = next.fetch_add(1)) {
      const int snr_idx = cell / cfg.trials;
      const int trial = cell % cfg.trials;
      const double snr = cfg.snr_db[snr_idx];
      TrialData td = generate_trial(cfg, snr, trial_seed(cfg.seed, snr_idx, trial));
      for (int blk = 0; blk < static_cast<int>(td.blocks.size()); ++blk) {
        const BlockData& data = td.blocks[blk];
        for (const std::string& algo : cfg.algorithms) {
          ResultRow row;
          row.scenario = cfg.scenario;
          row.algorithm = algo;
          row.snr_db = snr;
          row.trial = trial;
          row.block = blk;
          const auto start = std::chrono::steady_clock::now();
          try {
            SignalEstimate est = run_algorithm(algo, cfg, td.model, data, blk);
            std::vector<Vec> truth = data.h;
            std::vector<Vec> h_hat = est.h_hat;
            if (algo == "rt-skts") {  // warm-up excluded from the metric
              const size_t skip = std::min<size_t>(cfg.rt.warmup_len, truth.size());
              truth.erase(truth.begin(), truth.begin() + skip);
              h_hat.erase(h_hat.begin(), h_hat.begin() + skip);
            }
            row.mse_db = compute_mse_db(truth, h_hat);
            row.support_recovered = (est.support == data.support);
          } catch (const std::exception& e) {
            row.failed = true;
            row.mse_db = std::numeric_limits<double>::quiet_NaN();
            failures.fetch_add(1);
            std::cerr << "row failed (" << algo << ", snr " << snr << ", trial " << trial
                      << "): " << e.what() << "\n";
          }
          if (cfg.record_timing) {
            row.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
          }
          cell_rows[cell].push_back(std::move(row));
        }
      }
    }
  };

  const int threads = std::min(cfg.parallelism, cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  result.failures = failures.load();
  for (auto& rows : cell_rows) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  return result;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "scenario,algorithm,snr_db,trial,block,mse_db,support_recovered,runtime_ms\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.algorithm << ',' << fmt6(r.snr_db) << ',' << r.trial << ','
        << r.block << ',' << fmt6(r.mse_db) << ',' << (r.support_recovered ? 1 : 0) << ','
        << fmt6(r.runtime_ms) << '\n';
  }
}

void print_summary(std::ostream& os, const ExperimentResult& result) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  for (const auto& r : result.rows) {
    if (r.failed) continue;
    auto& [sum, count] = acc[{r.algorithm, r.snr_db}];
    sum += r.mse_db;
    ++count;
  }
  os << "algorithm          snr_db   mean_mse_db  rows\n";
  for (const auto& [key, val] : acc) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-18s %7.6g %12.6g %5d\n", key.first.c_str(), key.second,
                  val.first / val.second, val.second);
    os << line;
  }
  if (result.failures > 0) os << "failed rows: " << result.failures << "\n";
}

}  // namespace skts
