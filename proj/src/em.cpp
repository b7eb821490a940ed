#include "skts/em.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

namespace skts {

void SktsConfig::check(int m) const {
  if (tree_width < 1) throw std::invalid_argument("tree_width must be positive");
  if (sparsity_schedule.empty()) throw std::invalid_argument("empty sparsity schedule");
  for (size_t i = 0; i < sparsity_schedule.size(); ++i) {
    if (sparsity_schedule[i] < 0 || sparsity_schedule[i] > m) {
      throw std::invalid_argument("schedule entry outside [0, M]");
    }
    if (i > 0 && sparsity_schedule[i] > sparsity_schedule[i - 1]) {
      throw std::invalid_argument("sparsity schedule must be nonincreasing");
    }
  }
}

EmStatistics accumulate_statistics(const MeasurementBlock& block, const PosteriorStats& post) {
  block.check_consistent();
  const int m = block.signal_dim();
  if (static_cast<int>(post.means.size()) != block.length() ||
      static_cast<int>(post.covs.size()) != block.length()) {
    throw std::invalid_argument("posterior length != block length");
  }
  EmStatistics stats;
  stats.d = RealVec::Zero(m);
  stats.phi = RealMat::Zero(m, m);
  for (int n = 0; n < block.length(); ++n) {
    const Mat& b = block.system_matrices[n];
    const Vec& s_hat = post.means[n];
    if (s_hat.size() != m) throw std::invalid_argument("posterior mean dimension mismatch");
    Vec bhy = b.adjoint() * block.observations[n];
    stats.d += 2.0 * bhy.conjugate().cwiseProduct(s_hat).real();
    Mat gram = (b.adjoint() * b).conjugate();
    Mat second = post.covs[n] + s_hat * s_hat.adjoint();
    stats.phi += gram.cwiseProduct(second).real();
  }
  stats.phi = 0.5 * (stats.phi + stats.phi.transpose()).eval();
  return stats;
}

double q_score(const EmStatistics& stats, const SupportVector& c) {
  if (c.size() != stats.d.size()) throw std::invalid_argument("support length mismatch");
  double score = 0.0;
  const auto idx = c.indices();
  for (int j : idx) {
    score += stats.d[j] - stats.phi(j, j);
    for (int k : idx) {
      if (k < j) score -= 2.0 * stats.phi(j, k);
    }
  }
  return score;
}

namespace {

struct Node {
  std::vector<int> indices;  // sorted
  double score = 0.0;
};

// Survivor ordering: score descending, ties by lexicographic support indices.
bool better(const Node& a, const Node& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.indices < b.indices;
}

// One tree layer: expand every survivor by one bit, dedupe by support identity,
// keep the tree_width best.
std::vector<Node> expand_layer(const std::vector<Node>& survivors, const EmStatistics& stats,
                               int tree_width) {
  const int m = static_cast<int>(stats.d.size());
  std::map<std::vector<int>, double> seen;
  for (const Node& parent : survivors) {
    for (int j = 0; j < m; ++j) {
      if (std::binary_search(parent.indices.begin(), parent.indices.end(), j)) continue;
      double gain = stats.d[j] - stats.phi(j, j);
      for (int k : parent.indices) gain -= 2.0 * stats.phi(j, k);
      std::vector<int> child = parent.indices;
      child.insert(std::upper_bound(child.begin(), child.end(), j), j);
      seen.emplace(std::move(child), parent.score + gain);
    }
  }
  std::vector<Node> children;
  children.reserve(seen.size());
  for (auto& [idx, score] : seen) children.push_back(Node{idx, score});
  std::sort(children.begin(), children.end(), better);
  if (static_cast<int>(children.size()) > tree_width) children.resize(tree_width);
  return children;
}

}  // namespace

SupportVector greedy_tree_search(const EmStatistics& stats, int sparsity, int tree_width) {
  const int m = static_cast<int>(stats.d.size());
  if (sparsity > m) throw std::invalid_argument("sparsity exceeds dimension");
  if (sparsity < 0) throw std::invalid_argument("negative sparsity");
  if (tree_width < 1) throw std::invalid_argument("tree_width must be positive");
  std::vector<Node> survivors{Node{}};
  for (int layer = 0; layer < sparsity; ++layer) {
    survivors = expand_layer(survivors, stats, tree_width);
  }
  return SupportVector::from_indices(m, survivors.front().indices);
}

SupportVector greedy_tree_search_adaptive(const EmStatistics& stats, int max_sparsity,
                                          int tree_width, double score_drop_fraction) {
  const int m = static_cast<int>(stats.d.size());
  if (max_sparsity > m) throw std::invalid_argument("sparsity exceeds dimension");
  std::vector<Node> survivors{Node{}};
  double prev_best = 0.0;
  double gain_sum = 0.0;
  int gain_count = 0;
  std::vector<int> best = survivors.front().indices;
  for (int layer = 0; layer < max_sparsity; ++layer) {
    std::vector<Node> next = expand_layer(survivors, stats, tree_width);
    if (next.empty()) break;
    const double gain = next.front().score - prev_best;
    if (gain_count > 0 && gain < score_drop_fraction * (gain_sum / gain_count)) break;
    gain_sum += gain;
    ++gain_count;
    prev_best = next.front().score;
    survivors = std::move(next);
    best = survivors.front().indices;
  }
  return SupportVector::from_indices(m, best);
}

int estimate_sparsity_order(const MeasurementBlock& block, double threshold) {
  block.check_consistent();
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  const int m = block.signal_dim();
  int count = 0;
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    int used = 0;
    for (int n = 0; n < block.length(); ++n) {
      const auto col = block.system_matrices[n].col(j);
      const double norm2 = col.squaredNorm();
      if (norm2 == 0.0) continue;
      acc += std::abs(col.dot(block.observations[n])) / norm2;
      ++used;
    }
    if (used == 0) {
      std::cerr << "estimate_sparsity_order: column " << j << " has zero norm, skipped\n";
      continue;
    }
    if (acc / block.length() > threshold) ++count;
  }
  return count;
}

RealVec estimate_amplitude_variances(const MeasurementBlock& block, VarianceStatistic statistic) {
  block.check_consistent();
  const int m = block.signal_dim();
  const int t_len = block.length();
  RealVec out(m);
  for (int j = 0; j < m; ++j) {
    Complex mean_corr = 0.0;
    double energy = 0.0;
    for (int n = 0; n < t_len; ++n) {
      const auto col = block.system_matrices[n].col(j);
      const double norm2 = col.squaredNorm();
      if (norm2 == 0.0) throw std::invalid_argument("zero-norm column in amplitude estimate");
      const Complex corr = col.dot(block.observations[n]) / norm2;
      mean_corr += corr;
      energy += std::norm(corr);
    }
    out[j] = statistic == VarianceStatistic::kBlockMeanMagnitude
                 ? std::norm(mean_corr / static_cast<double>(t_len))
                 : energy / t_len;
  }
  return out;
}

namespace {

// Per-tap stationary variance from the smoothed means, used to rebuild a
// diagonal V for the final smoothing pass.
StateSpaceModel refine_model(const StateSpaceModel& model, const PosteriorStats& post) {
  if (!model.diagonal_dynamics) return model;
  const int m = model.dim;
  const int t_len = static_cast<int>(post.means.size());
  Vec mean = Vec::Zero(m);
  for (const Vec& s : post.means) mean += s;
  mean /= static_cast<double>(t_len);
  RealVec var = RealVec::Zero(m);
  for (const Vec& s : post.means) var += (s - mean).cwiseAbs2();
  var /= static_cast<double>(t_len);

  StateSpaceModel refined = model;
  for (int j = 0; j < m; ++j) {
    const double a2 = std::norm(model.state_transition(j, j));
    refined.process_noise_cov(j, j) = (1.0 - a2) * var[j];
    refined.prior_cov(j, j) = var[j];
  }
  return refined;
}

}  // namespace

SignalEstimate run_skts(const StateSpaceModel& model, const MeasurementBlock& block,
                        const SktsConfig& cfg, SktsDiagnostics* diag) {
  const int m = model.dim;
  cfg.check(m);
  block.check_consistent();
  if (block.signal_dim() != m) throw std::invalid_argument("block signal dimension != model dim");

  const int max_iter = cfg.max_iterations > 0
                           ? std::min<int>(cfg.max_iterations, cfg.sparsity_schedule.size())
                           : static_cast<int>(cfg.sparsity_schedule.size());
  SupportVector support = SupportVector::all_ones(m);
  PosteriorStats post;
  bool converged = false;
  int iterations = 0;
  for (int l = 0; l < max_iter && !converged; ++l) {
    post = smooth(model, block, support);
    EmStatistics stats = accumulate_statistics(block, post);
    SupportVector next =
        cfg.adaptive_depth
            ? greedy_tree_search_adaptive(stats, cfg.sparsity_schedule[l], cfg.tree_width,
                                          cfg.score_drop_fraction)
            : greedy_tree_search(stats, cfg.sparsity_schedule[l], cfg.tree_width);
    // Early stop applies once the schedule has reached the target sparsity;
    // a coincidental match at a relaxed K must not cut the annealing short.
    converged = (next == support) && cfg.sparsity_schedule[l] == cfg.sparsity_schedule.back();
    support = std::move(next);
    ++iterations;
    if (diag) {
      diag->supports.push_back(support);
      diag->q_scores.push_back(q_score(stats, support));
    }
  }
  if (diag) {
    diag->iterations = iterations;
    diag->converged_early = converged;
  }

  const StateSpaceModel& final_model_ref = model;
  StateSpaceModel refined;
  if (cfg.refine_process_noise_for_final) refined = refine_model(model, post);
  const StateSpaceModel& final_model = cfg.refine_process_noise_for_final ? refined : final_model_ref;

  PosteriorStats final_post = smooth(final_model, block, support);
  SignalEstimate est;
  est.support = support;
  est.h_hat.reserve(block.length());
  for (const Vec& s : final_post.means) {
    Vec h = Vec::Zero(m);
    for (int j : support.indices()) h[j] = s[j];
    est.h_hat.push_back(std::move(h));
  }
  return est;
}

}  // namespace skts
