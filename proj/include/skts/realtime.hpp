/// @file realtime.hpp Streaming variant: a cascade of Kalman filters with
/// auto-regressive running statistics replacing the block sums.

#pragma once

#include "skts/em.hpp"
#include "skts/kalman.hpp"
#include "skts/types.hpp"

namespace skts {

struct RtConfig {
  double forgetting_factor = 0.4;  ///< alpha in (0, 1]; tests may use 0
  int num_stages = 2;              ///< cascade depth, >= 2
  int tree_width = 5;
  int sparsity = 0;                ///< target K
  int warmup_len = 10;             ///< steps to exclude from metrics
  int search_stride = 1;           ///< tree-search cadence, >= 1
  /// Per-stage support sizes fed to stages 1..num_stages-1, mirroring the
  /// block annealing schedule; empty means every stage uses the target K.
  /// Size must be num_stages - 1 and the last entry must equal sparsity.
  std::vector<int> stage_sparsity;

  void check() const;
};

class RtState {
 public:
  RtState(const StateSpaceModel& model, const RtConfig& cfg);

  /// One streaming step: update every stage filter, refresh the running d/Phi
  /// of each stage from its previous snapshot, re-run the tree search per the
  /// stride, and return the masked last-stage filtered mean.
  Vec step(const Vec& y, const Mat& B);

  const SupportVector& support(int stage = 0) const;
  const RealVec& running_d(int stage = 0) const { return stats_[stage].d; }
  const RealMat& running_phi(int stage = 0) const { return stats_[stage].phi; }
  int steps_taken() const { return steps_; }
  bool warmed_up() const { return steps_ > cfg_.warmup_len; }

 private:
  struct Snapshot {
    Vec y;
    Mat b;
    Vec mean;
    Mat cov;
    bool valid = false;
  };

  StateSpaceModel model_;
  RtConfig cfg_;
  std::vector<StepState> filters_;       // one per stage
  std::vector<EmStatistics> stats_;      // running d/Phi per non-final stage
  std::vector<Snapshot> snapshots_;      // previous-step quantities per non-final stage
  std::vector<SupportVector> supports_;  // support feeding stage k+1
  int steps_ = 0;
};

/// Functional wrapper matching the one-step contract: consumes (y_n, B_n) once
/// and returns the masked estimate of h_n.
inline Vec rt_step(RtState& state, const Vec& y, const Mat& B) { return state.step(y, B); }

}  // namespace skts
