#include "skts/scenarios.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <numbers>

namespace skts {

Vec complex_gaussian(int len, double var, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(var / 2.0));
  Vec out(len);
  for (int i = 0; i < len; ++i) out[i] = Complex(dist(rng), dist(rng));
  return out;
}

Vec qpsk_sequence(int len, std::mt19937_64& rng) {
  static const Complex symbols[4] = {
      {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2},
      {std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2},
      {-std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2},
      {-std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}};
  std::uniform_int_distribution<int> dist(0, 3);
  Vec out(len);
  for (int i = 0; i < len; ++i) out[i] = symbols[dist(rng)];
  return out;
}

namespace {

std::vector<int> sample_distinct(int count, int range, std::mt19937_64& rng) {
  // Partial Fisher-Yates over [0, range).
  std::vector<int> pool(range);
  for (int i = 0; i < range; ++i) pool[i] = i;
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> dist(i, range - 1);
    std::swap(pool[i], pool[dist(rng)]);
  }
  return {pool.begin(), pool.begin() + count};
}

}  // namespace

// ---------------------------------------------------------------------------

double SyntheticConfig::meas_noise_var() const {
  // E||B h||^2 = N K sigma_s^2 / M for i.i.d. N(0, 1/M) entries.
  return sparsity * amplitude_var / (signal_dim * std::pow(10.0, snr_db / 10.0));
}

StateSpaceModel SyntheticConfig::model() const {
  return StateSpaceModel::diagonal(signal_dim, ar_coeff, amplitude_var, meas_noise_var());
}

MeasurementBlock BlockData::measurements(int block_index) const {
  MeasurementBlock mb;
  mb.block_index = block_index;
  mb.observations = y;
  mb.system_matrices = b;
  return mb;
}

SyntheticTrace generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.sparsity > cfg.signal_dim) throw std::invalid_argument("sparsity exceeds dimension");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> b_entry(0.0, 1.0 / std::sqrt(cfg.signal_dim));

  SyntheticTrace trace;
  trace.meas_noise_var = cfg.meas_noise_var();
  const double process_var = (1.0 - cfg.ar_coeff * cfg.ar_coeff) * cfg.amplitude_var;

  for (int blk = 0; blk < cfg.num_blocks; ++blk) {
    BlockData data;
    data.support =
        SupportVector::from_indices(cfg.signal_dim,
                                    sample_distinct(cfg.sparsity, cfg.signal_dim, rng));
    Mat fixed_b;
    if (cfg.b_mode == SyntheticConfig::BMode::kFixedPerBlock) {
      fixed_b = Mat(cfg.meas_dim, cfg.signal_dim);
      for (int r = 0; r < cfg.meas_dim; ++r)
        for (int c = 0; c < cfg.signal_dim; ++c) fixed_b(r, c) = b_entry(rng);
    }

    Vec s = complex_gaussian(cfg.signal_dim, cfg.amplitude_var, rng);  // stationary start
    for (int n = 0; n < cfg.block_len; ++n) {
      if (n > 0) {
        Vec v = complex_gaussian(cfg.signal_dim, process_var, rng);
        s = cfg.ar_coeff * s + v;
        data.v.push_back(std::move(v));
      }
      Vec h = Vec::Zero(cfg.signal_dim);
      for (int j : data.support.indices()) h[j] = s[j];

      Mat b;
      if (cfg.b_mode == SyntheticConfig::BMode::kFixedPerBlock) {
        b = fixed_b;
      } else {
        b = Mat(cfg.meas_dim, cfg.signal_dim);
        for (int r = 0; r < cfg.meas_dim; ++r)
          for (int c = 0; c < cfg.signal_dim; ++c) b(r, c) = b_entry(rng);
      }
      Vec w = complex_gaussian(cfg.meas_dim, trace.meas_noise_var, rng);
      data.y.push_back(b * h + w);
      data.s.push_back(s);
      data.h.push_back(std::move(h));
      data.w.push_back(std::move(w));
      data.b.push_back(std::move(b));
    }
    trace.blocks.push_back(std::move(data));
  }
  return trace;
}

// ---------------------------------------------------------------------------

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

TapProfile TapProfile::epa() {
  return {"EPA",
          {0e-9, 30e-9, 70e-9, 90e-9, 110e-9, 190e-9, 410e-9},
          {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8}};
}

TapProfile TapProfile::eva() {
  return {"EVA",
          {0e-9, 30e-9, 150e-9, 310e-9, 370e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9},
          {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9}};
}

TapProfile TapProfile::etu() {
  return {"ETU",
          {0e-9, 50e-9, 120e-9, 200e-9, 230e-9, 500e-9, 1600e-9, 2300e-9, 5000e-9},
          {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0}};
}

TapProfile TapProfile::exact_sparse(int sparsity, int cir_len, double sample_period,
                                    std::mt19937_64& rng) {
  std::vector<int> bins = sample_distinct(sparsity, cir_len, rng);
  std::sort(bins.begin(), bins.end());
  TapProfile profile;
  profile.name = "exact-sparse";
  for (int b : bins) {
    profile.delays_s.push_back(b * sample_period);
    profile.powers_db.push_back(0.0);
  }
  return profile;
}

FadedChannel fade_channel(const TapProfile& profile, double doppler_rate, int block_len,
                          double sample_period, int cir_len, std::uint64_t seed) {
  if (profile.delays_s.size() != profile.powers_db.size()) {
    throw std::invalid_argument("tap profile length mismatch");
  }
  std::mt19937_64 rng(seed);

  // Nearest-bin mapping; colliding taps add their powers.
  std::map<int, double> bin_power;
  double total = 0.0;
  for (size_t i = 0; i < profile.delays_s.size(); ++i) {
    const int bin = static_cast<int>(std::lround(profile.delays_s[i] / sample_period));
    if (bin < 0 || bin >= cir_len) throw std::invalid_argument("tap delay exceeds CIR window");
    const double p = std::pow(10.0, profile.powers_db[i] / 10.0);
    bin_power[bin] += p;
    total += p;
  }

  // Spectral synthesis: factor the block Toeplitz correlation J0(2 pi D_r r),
  // clipping the tiny negative eigenvalues the truncation can produce.
  RealMat corr(block_len, block_len);
  for (int i = 0; i < block_len; ++i)
    for (int j = 0; j < block_len; ++j)
      corr(i, j) = bessel_j0(2.0 * std::numbers::pi * doppler_rate * (i - j));
  Eigen::SelfAdjointEigenSolver<RealMat> es(corr);
  RealMat factor =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  FadedChannel ch;
  ch.taps.assign(block_len, Vec::Zero(cir_len));
  ch.ar_coeffs = RealVec::Constant(cir_len, bessel_j0(2.0 * std::numbers::pi * doppler_rate));
  ch.tap_vars = RealVec::Zero(cir_len);
  for (const auto& [bin, power] : bin_power) {
    const double var = power / total;
    ch.tap_vars[bin] = var;
    ch.active_bins.push_back(bin);
    Vec series = std::sqrt(var) * (factor * complex_gaussian(block_len, 1.0, rng));
    for (int n = 0; n < block_len; ++n) ch.taps[n][bin] = series[n];
  }
  return ch;
}

// ---------------------------------------------------------------------------

Mat build_ofdm_matrix(const Vec& pilot_values, const std::vector<int>& pilot_indices,
                      int total_subcarriers, int cir_len) {
  const int n = static_cast<int>(pilot_indices.size());
  if (pilot_values.size() != n) throw std::invalid_argument("pilot values/indices length mismatch");
  Mat b(n, cir_len);
  for (int j = 0; j < n; ++j) {
    const int row = pilot_indices[j];
    if (row < 0 || row >= total_subcarriers) {
      throw std::out_of_range("pilot index out of range");
    }
    for (int k = 0; k < cir_len; ++k) {
      const double angle =
          -2.0 * std::numbers::pi * static_cast<double>(row) * k / total_subcarriers;
      b(j, k) = pilot_values[j] * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return b;
}

OfdmBlock generate_ofdm_block(const OfdmScenario& scn, double snr_db, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TapProfile profile =
      TapProfile::exact_sparse(scn.sparsity, scn.cir_len, scn.sample_period(), rng);
  FadedChannel ch = fade_channel(profile, scn.doppler_rate, scn.block_len, scn.sample_period(),
                                 scn.cir_len, rng());

  // Unit-modulus pilots and unit total tap power give E||B h||^2 = N.
  const double noise_var = std::pow(10.0, -snr_db / 10.0);

  OfdmBlock out;
  out.data.support = SupportVector::from_indices(scn.cir_len, ch.active_bins);
  for (int n = 0; n < scn.block_len; ++n) {
    Vec pilots = qpsk_sequence(scn.num_pilots, rng);
    std::vector<int> positions = sample_distinct(scn.num_pilots, scn.total_subcarriers, rng);
    Mat b = build_ofdm_matrix(pilots, positions, scn.total_subcarriers, scn.cir_len);
    Vec w = complex_gaussian(scn.num_pilots, noise_var, rng);
    out.data.y.push_back(b * ch.taps[n] + w);
    out.data.s.push_back(ch.taps[n]);
    out.data.h.push_back(ch.taps[n]);
    out.data.w.push_back(std::move(w));
    out.data.b.push_back(std::move(b));
  }
  // Support-agnostic diagonal model: every bin gets the active-tap variance.
  out.model = StateSpaceModel::diagonal(
      RealVec::Constant(scn.cir_len, ch.ar_coeffs[0]),
      RealVec::Constant(scn.cir_len, 1.0 / scn.sparsity), noise_var);
  return out;
}

// ---------------------------------------------------------------------------

MeasurementBlock build_sc_block(const Vec& training, int cir_len, const std::vector<Vec>& cir) {
  const int t_len = static_cast<int>(cir.size());
  if (training.size() < cir_len) throw std::invalid_argument("training length must be >= CIR length");
  if (training.size() < t_len) throw std::invalid_argument("training shorter than block");
  MeasurementBlock mb;
  for (int n = 0; n < t_len; ++n) {
    Mat b = Mat::Zero(1, cir_len);
    for (int l = 0; l < cir_len; ++l) {
      if (n - l >= 0) b(0, l) = training[n - l];
    }
    mb.system_matrices.push_back(std::move(b));
    mb.observations.push_back(mb.system_matrices.back() * cir[n]);
  }
  return mb;
}

ScBlock generate_sc_block(const ScScenario& scn, double snr_db, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TapProfile profile = TapProfile::exact_sparse(scn.sparsity, scn.cir_len, 1.0, rng);
  FadedChannel ch =
      fade_channel(profile, scn.doppler_rate, scn.training_len, 1.0, scn.cir_len, rng());
  Vec training = qpsk_sequence(scn.training_len, rng);

  const double noise_var = std::pow(10.0, -snr_db / 10.0);
  MeasurementBlock mb = build_sc_block(training, scn.cir_len, ch.taps);

  ScBlock out;
  out.data.support = SupportVector::from_indices(scn.cir_len, ch.active_bins);
  for (int n = 0; n < scn.training_len; ++n) {
    Vec w = complex_gaussian(1, noise_var, rng);
    out.data.y.push_back(mb.observations[n] + w);
    out.data.s.push_back(ch.taps[n]);
    out.data.h.push_back(ch.taps[n]);
    out.data.w.push_back(std::move(w));
    out.data.b.push_back(mb.system_matrices[n]);
  }
  out.model = StateSpaceModel::diagonal(RealVec::Constant(scn.cir_len, ch.ar_coeffs[0]),
                                        RealVec::Constant(scn.cir_len, 1.0 / scn.sparsity),
                                        noise_var);
  return out;
}

}  // namespace skts
