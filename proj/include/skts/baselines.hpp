/// @file baselines.hpp Comparison estimators: conventional and oracle Kalman
/// smoothers, per-snapshot orthogonal matching pursuit.

#pragma once

#include "skts/kalman.hpp"
#include "skts/types.hpp"

namespace skts {

/// Kalman smoother with the all-ones support (no sparsity knowledge).
SignalEstimate conventional_ks(const StateSpaceModel& model, const MeasurementBlock& block);

/// Kalman smoother under the true support; the performance lower bound.
SignalEstimate oracle_ks(const StateSpaceModel& model, const MeasurementBlock& block,
                         const SupportVector& true_support);

struct OmpResult {
  SupportVector support;
  Vec amplitudes;  ///< full-length estimate, zero off the support
};

/// Standard OMP on a single snapshot: K rounds of maximal residual correlation
/// with a least-squares re-fit on the growing support.
OmpResult omp_per_snapshot(const Vec& y, const Mat& B, int sparsity);

/// OMP applied independently to every snapshot of a block. The support field of
/// the result is the last snapshot's support; per-snapshot supports differ.
SignalEstimate omp_block(const MeasurementBlock& block, int sparsity);

}  // namespace skts
