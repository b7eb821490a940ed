/// @file em.hpp Block-processing sparse Kalman tree search: E-step statistics,
/// greedy tree-search M-step, sparsity-order annealing, final reconstruction.

#pragma once

#include "skts/kalman.hpp"
#include "skts/types.hpp"

namespace skts {

/// How the rough per-tap amplitude variance statistic is averaged over a block.
enum class VarianceStatistic {
  kBlockMeanMagnitude,  ///< |(1/T) sum b^H y / ||b||^2|^2
  kPerSnapshotEnergy,   ///< (1/T) sum |b^H y|^2 / ||b||^4
};

struct SktsConfig {
  int tree_width = 5;                  ///< R, survivors kept per tree layer
  std::vector<int> sparsity_schedule;  ///< K^(l), nonincreasing, last entry = target K
  int max_iterations = 0;              ///< 0 means schedule length
  /// Rebuild a diagonal V from the empirical covariance of the smoothed means
  /// for the final smoothing pass only.
  bool refine_process_noise_for_final = false;
  /// Unknown-K mode: stop descending tree layers when the best per-layer score
  /// gain drops below score_drop_fraction of the mean gain so far.
  bool adaptive_depth = false;
  double score_drop_fraction = 0.05;

  /// Default annealing schedule: two iterations, 2K then K.
  static SktsConfig standard(int target_k) {
    SktsConfig cfg;
    cfg.sparsity_schedule = {2 * target_k, target_k};
    return cfg;
  }
  void check(int m) const;
};

struct SktsDiagnostics {
  std::vector<SupportVector> supports;  ///< support after each EM iteration
  std::vector<double> q_scores;         ///< score of the chosen support
  int iterations = 0;
  bool converged_early = false;
};

/// d and Phi of one block: d = sum_n 2 Re(y^H B diag(s_hat))^T,
/// Phi = sum_n Re(conj(B^H B) .* (Sigma + s_hat s_hat^H)).
EmStatistics accumulate_statistics(const MeasurementBlock& block, const PosteriorStats& post);

/// d^T c - c^T Phi c (constant and 1/sigma_w^2 scale dropped).
double q_score(const EmStatistics& stats, const SupportVector& c);

/// Layered beam search over supports, one bit asserted per layer, R survivors
/// kept, duplicates removed by support identity. Ties resolved by score then
/// lexicographically by support indices.
SupportVector greedy_tree_search(const EmStatistics& stats, int sparsity, int tree_width);

/// Unknown-K variant: descends at most max_sparsity layers, stopping early on a
/// big drop in the per-layer score gain.
SupportVector greedy_tree_search_adaptive(const EmStatistics& stats, int max_sparsity,
                                          int tree_width, double score_drop_fraction);

/// Counts columns whose block-averaged normalized correlation with y exceeds
/// the threshold. Zero-norm columns are skipped.
int estimate_sparsity_order(const MeasurementBlock& block, double threshold);

/// Rough per-tap amplitude variance estimate from column/observation correlation.
RealVec estimate_amplitude_variances(const MeasurementBlock& block,
                                     VarianceStatistic statistic = VarianceStatistic::kBlockMeanMagnitude);

/// Full EM loop: all-ones initialization, smoothing E-step, tree-search M-step
/// with the annealed sparsity schedule, final smoothing and masked output.
SignalEstimate run_skts(const StateSpaceModel& model, const MeasurementBlock& block,
                        const SktsConfig& cfg, SktsDiagnostics* diag = nullptr);

}  // namespace skts
