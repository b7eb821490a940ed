#include "skts/baselines.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace skts {

namespace {

SignalEstimate masked_smooth(const StateSpaceModel& model, const MeasurementBlock& block,
                             const SupportVector& support) {
  PosteriorStats post = smooth(model, block, support);
  SignalEstimate est;
  est.support = support;
  est.h_hat.reserve(post.means.size());
  const auto idx = support.indices();
  for (const Vec& s : post.means) {
    Vec h = Vec::Zero(model.dim);
    for (int j : idx) h[j] = s[j];
    est.h_hat.push_back(std::move(h));
  }
  return est;
}

}  // namespace

SignalEstimate conventional_ks(const StateSpaceModel& model, const MeasurementBlock& block) {
  return masked_smooth(model, block, SupportVector::all_ones(model.dim));
}

SignalEstimate oracle_ks(const StateSpaceModel& model, const MeasurementBlock& block,
                         const SupportVector& true_support) {
  return masked_smooth(model, block, true_support);
}

OmpResult omp_per_snapshot(const Vec& y, const Mat& B, int sparsity) {
  const int n = static_cast<int>(B.rows());
  const int m = static_cast<int>(B.cols());
  if (sparsity > n) throw std::invalid_argument("OMP sparsity exceeds measurement dimension");

  std::vector<int> picked;
  std::vector<bool> in_support(m, false);
  Vec residual = y;
  Vec coeffs;
  for (int it = 0; it < sparsity; ++it) {
    int best = -1;
    double best_corr = -1.0;
    for (int j = 0; j < m; ++j) {
      if (in_support[j]) continue;
      const double nrm = B.col(j).norm();
      if (nrm == 0.0) continue;
      const double corr = std::abs(B.col(j).dot(residual)) / nrm;
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    if (best < 0) break;
    picked.push_back(best);
    in_support[best] = true;

    Mat sub(n, picked.size());
    for (size_t a = 0; a < picked.size(); ++a) sub.col(a) = B.col(picked[a]);
    // Ridge-regularized normal equations; survives collinear selections.
    Mat gram = sub.adjoint() * sub;
    gram.diagonal().array() += 1e-12;
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
      throw std::runtime_error("OMP: rank-deficient selected submatrix");
    }
    coeffs = ldlt.solve(sub.adjoint() * y);
    residual = y - sub * coeffs;
  }

  OmpResult out;
  out.support = SupportVector::from_indices(m, picked);
  out.amplitudes = Vec::Zero(m);
  for (size_t a = 0; a < picked.size(); ++a) out.amplitudes[picked[a]] = coeffs[a];
  return out;
}

SignalEstimate omp_block(const MeasurementBlock& block, int sparsity) {
  block.check_consistent();
  SignalEstimate est;
  est.h_hat.reserve(block.length());
  for (int n = 0; n < block.length(); ++n) {
    OmpResult r = omp_per_snapshot(block.observations[n], block.system_matrices[n], sparsity);
    est.h_hat.push_back(std::move(r.amplitudes));
    est.support = std::move(r.support);
  }
  return est;
}

}  // namespace skts
