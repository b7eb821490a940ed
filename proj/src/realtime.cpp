#include "skts/realtime.hpp"

namespace skts {

void RtConfig::check() const {
  if (!(forgetting_factor >= 0.0 && forgetting_factor <= 1.0)) {
    throw std::invalid_argument("forgetting_factor must lie in [0, 1]");
  }
  if (num_stages < 2) throw std::invalid_argument("num_stages must be >= 2");
  if (tree_width < 1) throw std::invalid_argument("tree_width must be positive");
  if (sparsity < 0) throw std::invalid_argument("negative sparsity");
  if (search_stride < 1) throw std::invalid_argument("search_stride must be >= 1");
  if (warmup_len < 0) throw std::invalid_argument("negative warmup_len");
  if (!stage_sparsity.empty()) {
    if (static_cast<int>(stage_sparsity.size()) != num_stages - 1) {
      throw std::invalid_argument("stage_sparsity size must be num_stages - 1");
    }
    if (stage_sparsity.back() != sparsity) {
      throw std::invalid_argument("last stage_sparsity entry must equal sparsity");
    }
    for (size_t i = 1; i < stage_sparsity.size(); ++i) {
      if (stage_sparsity[i] > stage_sparsity[i - 1]) {
        throw std::invalid_argument("stage_sparsity must be nonincreasing");
      }
    }
  }
}

RtState::RtState(const StateSpaceModel& model, const RtConfig& cfg) : model_(model), cfg_(cfg) {
  cfg_.check();
  if (cfg_.sparsity > model.dim) throw std::invalid_argument("sparsity exceeds dimension");
  const int m = model.dim;
  filters_.resize(cfg_.num_stages);
  snapshots_.resize(cfg_.num_stages - 1);
  stats_.resize(cfg_.num_stages - 1);
  for (auto& s : stats_) {
    s.d = RealVec::Zero(m);
    s.phi = RealMat::Zero(m, m);
  }
  // All-zero statistics resolve to the lexicographically smallest K-set.
  supports_.assign(cfg_.num_stages - 1, SupportVector());
}

const SupportVector& RtState::support(int stage) const { return supports_.at(stage); }

Vec RtState::step(const Vec& y, const Mat& B) {
  const int m = model_.dim;
  const double alpha = cfg_.forgetting_factor;

  // Auto-regressive statistics refresh from the previous snapshot, then the
  // tree search; both precede this step's filtering (one-step latency).
  // During warm-up the update runs as a cumulative (equal-weight) mean so the
  // statistics converge before the forgetting factor takes over.
  const double a_eff =
      (steps_ <= cfg_.warmup_len && steps_ > 0) ? 1.0 / steps_ : alpha;
  for (int k = 0; k + 1 < cfg_.num_stages; ++k) {
    Snapshot& snap = snapshots_[k];
    if (snap.valid && alpha > 0.0) {
      Vec bhy = snap.b.adjoint() * snap.y;
      stats_[k].d = (1.0 - a_eff) * stats_[k].d +
                    a_eff * 2.0 * bhy.conjugate().cwiseProduct(snap.mean).real();
      Mat gram = (snap.b.adjoint() * snap.b).conjugate();
      Mat second = snap.cov + snap.mean * snap.mean.adjoint();
      stats_[k].phi =
          (1.0 - a_eff) * stats_[k].phi + a_eff * gram.cwiseProduct(second).real();
      stats_[k].phi = 0.5 * (stats_[k].phi + stats_[k].phi.transpose()).eval();
    }
    if (supports_[k].size() == 0 || steps_ % cfg_.search_stride == 0) {
      const int k_stage = cfg_.stage_sparsity.empty() ? cfg_.sparsity : cfg_.stage_sparsity[k];
      supports_[k] = greedy_tree_search(stats_[k], k_stage, cfg_.tree_width);
    }
  }

  const SupportVector all = SupportVector::all_ones(m);
  for (int k = 0; k < cfg_.num_stages; ++k) {
    const SupportVector& c = (k == 0) ? all : supports_[k - 1];
    filter_step(model_, filters_[k], y, B, c);
    if (k + 1 < cfg_.num_stages) {
      Snapshot& snap = snapshots_[k];
      snap.y = y;
      snap.b = B;
      snap.mean = filters_[k].mean;
      snap.cov = filters_[k].cov;
      snap.valid = true;
    }
  }
  ++steps_;

  const SupportVector& out_support = supports_.back();
  Vec h = Vec::Zero(m);
  for (int j : out_support.indices()) h[j] = filters_.back().mean[j];
  return h;
}

}  // namespace skts
