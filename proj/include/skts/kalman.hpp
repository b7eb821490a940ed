/// @file kalman.hpp Fixed-interval Kalman smoother under a masked system matrix,
/// plus a batch-LMMSE oracle used for testing.

#pragma once

#include "skts/types.hpp"

namespace skts {

/// Forward-pass quantities for one block.
struct FilterState {
  std::vector<Vec> filtered_means;   ///< s_{n|n}
  std::vector<Mat> filtered_covs;    ///< Sigma_{n|n}
  std::vector<Vec> predicted_means;  ///< s_{n|n-1}
  std::vector<Mat> predicted_covs;   ///< Sigma_{n|n-1}
  std::vector<Mat> gains;            ///< K_n, M x N
};

/// Forward Kalman filter over the block with measurement matrix B_n diag(c).
/// The model prior is the predicted distribution of the first state.
FilterState forward_filter(const StateSpaceModel& model, const MeasurementBlock& block,
                           const SupportVector& support);

/// Backward (fixed-interval) smoothing pass over a completed forward filter.
PosteriorStats backward_smooth(const StateSpaceModel& model, const FilterState& fwd);

/// Forward + backward in one call. For diagonal models with a sparse support the
/// recursion runs on the active sub-state and inactive entries keep their prior
/// marginals; the result is identical to the full-dimension recursion.
PosteriorStats smooth(const StateSpaceModel& model, const MeasurementBlock& block,
                      const SupportVector& support);

/// Direct joint-Gaussian conditioning over the stacked T*M state. Test-scale
/// only: throws when T*M exceeds max_joint_dim.
PosteriorStats batch_lmmse_oracle(const StateSpaceModel& model, const MeasurementBlock& block,
                                  const SupportVector& support, int max_joint_dim = 4096);

/// Single-step filter state for streaming use.
struct StepState {
  Vec mean;
  Mat cov;
  bool primed = false;  ///< false until the first update consumed the prior
};

/// One predict+update cycle; the first call uses the model prior as prediction.
void filter_step(const StateSpaceModel& model, StepState& state, const Vec& y, const Mat& B,
                 const SupportVector& support);

/// Observed-data log-likelihood ln Pr(y_{1:T}; c) up to the -N T ln(pi) constant,
/// from the same joint Gaussian the oracle uses. Test-scale only.
double block_log_likelihood(const StateSpaceModel& model, const MeasurementBlock& block,
                            const SupportVector& support);

}  // namespace skts
