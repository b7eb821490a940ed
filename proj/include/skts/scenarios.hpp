/// @file scenarios.hpp Data generators and system-matrix builders for the
/// synthetic, OFDM and single-carrier experiments.

#pragma once

#include "skts/types.hpp"

#include <cstdint>
#include <random>

namespace skts {

// ---------------------------------------------------------------------------
// Synthetic Gauss-Markov experiment

struct SyntheticConfig {
  int signal_dim = 200;    ///< M
  int meas_dim = 40;       ///< N
  int sparsity = 15;       ///< K
  int block_len = 30;      ///< T
  int num_blocks = 1;
  double ar_coeff = 0.8;   ///< alpha in [0, 1)
  double amplitude_var = 1.0;  ///< sigma_s^2
  double snr_db = 20.0;
  std::uint64_t seed = 0;
  enum class BMode { kFreshPerSnapshot, kFixedPerBlock };
  BMode b_mode = BMode::kFreshPerSnapshot;

  /// Noise variance implied by the configured SNR at the observation:
  /// SNR = E||B h||^2 / E||w||^2 with i.i.d. N(0, 1/M) entries of B.
  double meas_noise_var() const;
  /// The matching diagonal model (alpha I, sigma_s^2 (1 - alpha^2) I).
  StateSpaceModel model() const;
};

struct BlockData {
  SupportVector support;
  std::vector<Vec> s;  ///< amplitude process
  std::vector<Vec> h;  ///< diag(c) s
  std::vector<Vec> y;
  std::vector<Vec> v;  ///< realized process noise (length T-1)
  std::vector<Vec> w;  ///< realized measurement noise
  std::vector<Mat> b;

  MeasurementBlock measurements(int block_index = 0) const;
};

struct SyntheticTrace {
  std::vector<BlockData> blocks;
  double meas_noise_var = 0.0;
};

SyntheticTrace generate_synthetic(const SyntheticConfig& cfg);

// ---------------------------------------------------------------------------
// Fading-channel machinery (Jake's model)

struct TapProfile {
  std::string name;
  std::vector<double> delays_s;   ///< nondecreasing
  std::vector<double> powers_db;

  static TapProfile epa();
  static TapProfile eva();
  static TapProfile etu();
  /// Exact K-sparse profile: K random delay bins, equal power.
  static TapProfile exact_sparse(int sparsity, int cir_len, double sample_period,
                                 std::mt19937_64& rng);
};

struct FadedChannel {
  std::vector<Vec> taps;  ///< h_n, length T, each cir_len
  RealVec ar_coeffs;      ///< fitted alpha_j (J0 lag-1 match)
  RealVec tap_vars;       ///< sigma_{s,j}^2, sums to 1
  std::vector<int> active_bins;
};

/// Zeroth-order Bessel function of the first kind.
double bessel_j0(double x);

/// Stationary complex Gaussian taps with lag-r correlation J0(2 pi D_r r),
/// powers normalized to unit total. Taps map to the nearest delay bin.
FadedChannel fade_channel(const TapProfile& profile, double doppler_rate, int block_len,
                          double sample_period, int cir_len, std::uint64_t seed);

// ---------------------------------------------------------------------------
// OFDM channel-estimation experiment

struct OfdmScenario {
  int total_subcarriers = 1024;  ///< P
  int num_pilots = 32;           ///< N per pilot-bearing symbol
  int cir_len = 200;             ///< M
  int block_len = 30;            ///< T
  int sparsity = 8;              ///< K of the exact-sparse channel
  double doppler_rate = 0.05;    ///< D_r = f_d T_s

  double sample_period() const { return 1.0 / (total_subcarriers * 15e3); }
};

/// B_n = diag(p_n) Pi_n F_P Phi: row j is p_j times DFT row pilot_indices[j]
/// restricted to the first cir_len columns.
Mat build_ofdm_matrix(const Vec& pilot_values, const std::vector<int>& pilot_indices,
                      int total_subcarriers, int cir_len);

struct OfdmBlock {
  BlockData data;
  StateSpaceModel model;  ///< fitted diagonal model with uniform tap variance
};

/// One block of the exact-K-sparse OFDM experiment: random QPSK pilots, fresh
/// pilot positions per symbol, Jake's-faded taps, SNR-calibrated noise.
OfdmBlock generate_ofdm_block(const OfdmScenario& scn, double snr_db, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Single-carrier channel-estimation experiment

struct ScScenario {
  int training_len = 200;  ///< number of training symbols (one observation each)
  int cir_len = 16;        ///< M
  int sparsity = 4;
  double doppler_rate = 0.01;
};

/// Row-vector system matrices B_n = t_n^H from a training sequence; symbols
/// before index M use zero-padded history.
MeasurementBlock build_sc_block(const Vec& training, int cir_len, const std::vector<Vec>& cir);

struct ScBlock {
  BlockData data;
  StateSpaceModel model;
};

ScBlock generate_sc_block(const ScScenario& scn, double snr_db, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Unit-modulus QPSK pseudo-random symbols.
Vec qpsk_sequence(int len, std::mt19937_64& rng);

/// Circularly symmetric complex Gaussian vector with per-entry variance var.
Vec complex_gaussian(int len, double var, std::mt19937_64& rng);

}  // namespace skts
