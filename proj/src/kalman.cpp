#include "skts/kalman.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace skts {

namespace {

struct Update {
  Vec mean;
  Mat cov;
  Mat gain;
};

// Measurement update under B diag(c). Solves the N x N innovation system
// instead of forming an explicit inverse.
Update measurement_update(const Vec& pred_mean, const Mat& pred_cov, const Vec& y, const Mat& B,
                          const SupportVector& support, double meas_noise_var) {
  const int n = static_cast<int>(y.size());
  Mat masked_b = B * support.mask().cast<Complex>().asDiagonal();
  Mat cross = masked_b * pred_cov;  // N x M, equals (P D B^H)^H
  Mat innov_cov = cross * masked_b.adjoint();
  innov_cov.diagonal().array() += meas_noise_var;
  Eigen::LDLT<Mat> ldlt(detail::hermitian_part(innov_cov));
  Update up;
  up.gain = ldlt.solve(cross).adjoint();  // M x N
  up.mean = pred_mean + up.gain * (y - masked_b * pred_mean);
  up.cov = detail::hermitian_part(pred_cov - up.gain * cross);
  return up;
}

// Predicted covariance A Sigma A^H + V; O(M^2) when A is diagonal.
Mat predict_cov(const StateSpaceModel& model, const Mat& cov) {
  const Mat& a = model.state_transition;
  if (model.diagonal_dynamics) {
    Vec ad = a.diagonal();
    return detail::hermitian_part(Mat((ad * ad.adjoint()).cwiseProduct(cov)) +
                                  model.process_noise_cov);
  }
  return detail::hermitian_part(a * cov * a.adjoint() + model.process_noise_cov);
}

Vec predict_mean(const StateSpaceModel& model, const Vec& mean) {
  if (model.diagonal_dynamics) return model.state_transition.diagonal().cwiseProduct(mean);
  return model.state_transition * mean;
}

void check_finite(const Vec& y, const Mat& b) {
  if (!y.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("non-finite values in measurement inputs");
  }
}

// Builds the reduced model over the active indices of a diagonal model.
StateSpaceModel restrict_model(const StateSpaceModel& model, const std::vector<int>& active) {
  const int k = static_cast<int>(active.size());
  StateSpaceModel sub;
  sub.dim = k;
  sub.state_transition = Mat::Zero(k, k);
  sub.process_noise_cov = Mat::Zero(k, k);
  sub.prior_cov = Mat::Zero(k, k);
  sub.prior_mean = Vec(k);
  for (int a = 0; a < k; ++a) {
    const int j = active[a];
    sub.state_transition(a, a) = model.state_transition(j, j);
    sub.process_noise_cov(a, a) = model.process_noise_cov(j, j);
    sub.prior_cov(a, a) = model.prior_cov(j, j);
    sub.prior_mean[a] = model.prior_mean[j];
  }
  sub.meas_noise_var = model.meas_noise_var;
  sub.diagonal_dynamics = true;
  return sub;
}

}  // namespace

FilterState forward_filter(const StateSpaceModel& model, const MeasurementBlock& block,
                           const SupportVector& support) {
  block.check_consistent();
  const int t_len = block.length();
  const int m = model.dim;
  if (block.signal_dim() != m) throw std::invalid_argument("block signal dimension != model dim");
  if (support.size() != m) throw std::invalid_argument("support length != model dim");

  FilterState fs;
  fs.filtered_means.reserve(t_len);
  fs.filtered_covs.reserve(t_len);
  fs.predicted_means.reserve(t_len);
  fs.predicted_covs.reserve(t_len);
  fs.gains.reserve(t_len);

  const Mat& a = model.state_transition;
  Vec pred_mean;
  Mat pred_cov;
  for (int n = 0; n < t_len; ++n) {
    if (n == 0) {
      pred_mean = model.prior_mean;
      pred_cov = model.prior_cov;
    } else {
      pred_mean = predict_mean(model, fs.filtered_means.back());
      pred_cov = predict_cov(model, fs.filtered_covs.back());
    }
    check_finite(block.observations[n], block.system_matrices[n]);
    Update up = measurement_update(pred_mean, pred_cov, block.observations[n],
                                   block.system_matrices[n], support, model.meas_noise_var);
    fs.predicted_means.push_back(std::move(pred_mean));
    fs.predicted_covs.push_back(std::move(pred_cov));
    fs.filtered_means.push_back(std::move(up.mean));
    fs.filtered_covs.push_back(std::move(up.cov));
    fs.gains.push_back(std::move(up.gain));
  }
  return fs;
}

PosteriorStats backward_smooth(const StateSpaceModel& model, const FilterState& fwd) {
  const int t_len = static_cast<int>(fwd.filtered_means.size());
  if (t_len == 0) throw std::invalid_argument("empty filter state");
  const int m = model.dim;
  const Mat& a = model.state_transition;

  PosteriorStats out;
  out.means.assign(t_len, Vec());
  out.covs.assign(t_len, Mat());
  out.means[t_len - 1] = fwd.filtered_means[t_len - 1];
  out.covs[t_len - 1] = fwd.filtered_covs[t_len - 1];

  for (int n = t_len - 2; n >= 0; --n) {
    Mat pred = fwd.predicted_covs[n + 1];
    const double tr = pred.real().trace();
    Eigen::LDLT<Mat> ldlt(pred);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().real().minCoeff() < 1e-12 * tr / m) {
      pred.diagonal().array() += 1e-10 * tr / m;
      ldlt.compute(pred);
    }
    // S_n = Sigma_{n|n} A^H Sigma_{n+1|n}^{-1}
    Mat a_cov = model.diagonal_dynamics
                    ? Mat(a.diagonal().asDiagonal() * fwd.filtered_covs[n])
                    : Mat(a * fwd.filtered_covs[n]);
    Mat gain = ldlt.solve(a_cov).adjoint();
    out.means[n] =
        fwd.filtered_means[n] + gain * (out.means[n + 1] - fwd.predicted_means[n + 1]);
    out.covs[n] = detail::hermitian_part(
        fwd.filtered_covs[n] +
        gain * (out.covs[n + 1] - fwd.predicted_covs[n + 1]) * gain.adjoint());
  }
  return out;
}

PosteriorStats smooth(const StateSpaceModel& model, const MeasurementBlock& block,
                      const SupportVector& support) {
  const int m = model.dim;
  if (!model.diagonal_dynamics || support.sparsity() == m) {
    return backward_smooth(model, forward_filter(model, block, support));
  }

  // Diagonal dynamics: inactive entries never couple to the observations, so
  // the recursion runs on the active sub-state and inactive entries keep their
  // prior marginals.
  const std::vector<int> active = support.indices();
  const int k = static_cast<int>(active.size());
  StateSpaceModel sub = restrict_model(model, active);
  MeasurementBlock sub_block;
  sub_block.block_index = block.block_index;
  sub_block.observations = block.observations;
  sub_block.system_matrices.reserve(block.length());
  for (const Mat& b : block.system_matrices) {
    Mat cols(b.rows(), k);
    for (int a = 0; a < k; ++a) cols.col(a) = b.col(active[a]);
    sub_block.system_matrices.push_back(std::move(cols));
  }
  PosteriorStats sub_post =
      backward_smooth(sub, forward_filter(sub, sub_block, SupportVector::all_ones(k)));

  const int t_len = block.length();
  PosteriorStats out;
  out.means.assign(t_len, Vec::Zero(m));
  out.covs.assign(t_len, Mat::Zero(m, m));
  // Prior marginals of the inactive entries, propagated through the dynamics.
  Vec inactive_mean = model.prior_mean;
  Vec inactive_var = model.prior_cov.diagonal();
  for (int n = 0; n < t_len; ++n) {
    if (n > 0) {
      for (int j = 0; j < m; ++j) {
        const Complex alpha = model.state_transition(j, j);
        inactive_mean[j] *= alpha;
        inactive_var[j] = std::norm(alpha) * inactive_var[j] + model.process_noise_cov(j, j);
      }
    }
    for (int j = 0; j < m; ++j) {
      if (!support[j]) {
        out.means[n][j] = inactive_mean[j];
        out.covs[n](j, j) = inactive_var[j];
      }
    }
    for (int a = 0; a < k; ++a) {
      out.means[n][active[a]] = sub_post.means[n][a];
      for (int b = 0; b < k; ++b) {
        out.covs[n](active[a], active[b]) = sub_post.covs[n](a, b);
      }
    }
  }
  return out;
}

namespace {

struct JointGaussian {
  Vec mean;       // stacked prior mean, T*M
  Mat cov;        // stacked prior covariance
  Mat obs;        // block-diagonal masked observation map, T*N x T*M
  Vec y;          // stacked observations
};

JointGaussian build_joint(const StateSpaceModel& model, const MeasurementBlock& block,
                          const SupportVector& support, int max_joint_dim) {
  block.check_consistent();
  const int t_len = block.length();
  const int m = model.dim;
  const int n = block.meas_dim();
  if (static_cast<long>(t_len) * m > max_joint_dim) {
    throw std::invalid_argument("joint system exceeds the oracle size guard");
  }
  const Mat& a = model.state_transition;

  JointGaussian jg;
  jg.mean = Vec::Zero(t_len * m);
  jg.cov = Mat::Zero(t_len * m, t_len * m);
  jg.mean.segment(0, m) = model.prior_mean;
  for (int i = 1; i < t_len; ++i) {
    jg.mean.segment(i * m, m) = a * jg.mean.segment((i - 1) * m, m);
  }
  jg.cov.block(0, 0, m, m) = model.prior_cov;
  for (int i = 1; i < t_len; ++i) {
    jg.cov.block(i * m, i * m, m, m) = detail::hermitian_part(
        a * jg.cov.block((i - 1) * m, (i - 1) * m, m, m) * a.adjoint() +
        model.process_noise_cov);
    for (int j = i - 1; j >= 0; --j) {
      // Cov(s_i, s_j) = A Cov(s_{i-1}, s_j)
      jg.cov.block(i * m, j * m, m, m) = a * jg.cov.block((i - 1) * m, j * m, m, m);
      jg.cov.block(j * m, i * m, m, m) = jg.cov.block(i * m, j * m, m, m).adjoint();
    }
  }

  jg.obs = Mat::Zero(t_len * n, t_len * m);
  jg.y = Vec(t_len * n);
  const Mat mask = support.mask().cast<Complex>().asDiagonal();
  for (int i = 0; i < t_len; ++i) {
    jg.obs.block(i * n, i * m, n, m) = block.system_matrices[i] * mask;
    jg.y.segment(i * n, n) = block.observations[i];
  }
  return jg;
}

}  // namespace

PosteriorStats batch_lmmse_oracle(const StateSpaceModel& model, const MeasurementBlock& block,
                                  const SupportVector& support, int max_joint_dim) {
  JointGaussian jg = build_joint(model, block, support, max_joint_dim);
  const int t_len = block.length();
  const int m = model.dim;

  Mat cross = jg.obs * jg.cov;  // T*N x T*M
  Mat innov = cross * jg.obs.adjoint();
  innov.diagonal().array() += model.meas_noise_var;
  Eigen::LDLT<Mat> ldlt(detail::hermitian_part(innov));
  Vec post_mean = jg.mean + cross.adjoint() * ldlt.solve(jg.y - jg.obs * jg.mean);
  Mat post_cov = jg.cov - cross.adjoint() * ldlt.solve(cross);

  PosteriorStats out;
  out.means.reserve(t_len);
  out.covs.reserve(t_len);
  for (int i = 0; i < t_len; ++i) {
    out.means.push_back(post_mean.segment(i * m, m));
    out.covs.push_back(detail::hermitian_part(post_cov.block(i * m, i * m, m, m)));
  }
  return out;
}

void filter_step(const StateSpaceModel& model, StepState& state, const Vec& y, const Mat& B,
                 const SupportVector& support) {
  check_finite(y, B);
  Vec pred_mean;
  Mat pred_cov;
  if (!state.primed) {
    pred_mean = model.prior_mean;
    pred_cov = model.prior_cov;
    state.primed = true;
  } else {
    pred_mean = predict_mean(model, state.mean);
    pred_cov = predict_cov(model, state.cov);
  }
  Update up = measurement_update(pred_mean, pred_cov, y, B, support, model.meas_noise_var);
  state.mean = std::move(up.mean);
  state.cov = std::move(up.cov);
}

double block_log_likelihood(const StateSpaceModel& model, const MeasurementBlock& block,
                            const SupportVector& support) {
  JointGaussian jg = build_joint(model, block, support, 4096);
  Mat innov = jg.obs * jg.cov * jg.obs.adjoint();
  innov.diagonal().array() += model.meas_noise_var;
  Eigen::LDLT<Mat> ldlt(detail::hermitian_part(innov));
  const Vec resid = jg.y - jg.obs * jg.mean;
  const double quad = resid.dot(ldlt.solve(resid)).real();
  const double log_det = ldlt.vectorD().real().array().log().sum();
  return -log_det - quad;
}

}  // namespace skts
