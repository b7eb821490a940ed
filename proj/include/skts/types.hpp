/// @file types.hpp Shared data types for sparse Kalman tree search and friends.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace skts {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

/// Relative eigenvalue tolerance accepted when checking positive semidefiniteness.
inline constexpr double kPsdTol = 1e-9;

/// Gauss-Markov state dynamics s_{n+1} = A s_n + v_n observed through additive
/// white noise of variance meas_noise_var. prior_mean/prior_cov describe the
/// distribution of the first state in a block.
struct StateSpaceModel {
  int dim = 0;                  ///< state dimension M
  Mat state_transition;         ///< A, M x M
  Mat process_noise_cov;        ///< V, M x M Hermitian PSD
  double meas_noise_var = 1.0;  ///< sigma_w^2
  Vec prior_mean;
  Mat prior_cov;
  /// Set when A, V and prior_cov are all diagonal. Enables reduced-support
  /// smoothing; the generic path ignores it.
  bool diagonal_dynamics = false;

  /// Build the diagonal model A = diag(alpha), V = diag((1 - alpha^2) amp_var)
  /// with the stationary prior (zero mean, cov diag(amp_var)).
  static StateSpaceModel diagonal(const RealVec& ar_coeff, const RealVec& amp_var,
                                  double meas_noise_var);
  /// Scalar-parameter convenience: alpha I, (1 - alpha^2) sigma_s^2 I.
  static StateSpaceModel diagonal(int dim, double ar_coeff, double amp_var,
                                  double meas_noise_var);
};

/// Returns the list of violated invariants; empty means the model is valid.
std::vector<std::string> validate_model(const StateSpaceModel& model);

/// T observation vectors and their system matrices for one processing block.
struct MeasurementBlock {
  int block_index = 0;
  std::vector<Vec> observations;     ///< y_n, each N x 1
  std::vector<Mat> system_matrices;  ///< B_n, each N x M

  int length() const { return static_cast<int>(observations.size()); }
  int meas_dim() const { return observations.empty() ? 0 : static_cast<int>(observations[0].size()); }
  int signal_dim() const {
    return system_matrices.empty() ? 0 : static_cast<int>(system_matrices[0].cols());
  }
  /// Throws std::invalid_argument when shapes are inconsistent.
  void check_consistent() const;
};

/// Binary signal-existence vector c with exactly K asserted entries.
class SupportVector {
 public:
  SupportVector() = default;
  /// Throws std::invalid_argument if popcount(bits) != sparsity.
  SupportVector(std::vector<bool> bits, int sparsity);

  static SupportVector all_ones(int m);
  static SupportVector all_zeros(int m);
  static SupportVector from_indices(int m, std::vector<int> indices);

  const std::vector<bool>& bits() const { return bits_; }
  bool operator[](int j) const { return bits_[j]; }
  int size() const { return static_cast<int>(bits_.size()); }
  int sparsity() const { return sparsity_; }
  std::vector<int> indices() const;
  /// 0/1 mask as a real vector, handy for diag(c) products.
  RealVec mask() const;

  friend bool operator==(const SupportVector& a, const SupportVector& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<bool> bits_;
  int sparsity_ = 0;
};

/// Smoothed (or filtered) means and covariances for one block.
struct PosteriorStats {
  std::vector<Vec> means;  ///< each M x 1
  std::vector<Mat> covs;   ///< each M x M Hermitian PSD
};

/// Accumulated M-step inputs: Q(c) = d^T c - c^T Phi c up to scale and constant.
struct EmStatistics {
  RealVec d;
  RealMat phi;
};

/// Final per-block signal estimate; entries off the support are exactly zero.
struct SignalEstimate {
  std::vector<Vec> h_hat;
  SupportVector support;
};

namespace detail {
/// Hermitian part (X + X^H) / 2; covariance drift control.
inline Mat hermitian_part(const Mat& x) { return 0.5 * (x + x.adjoint()); }
}  // namespace detail

}  // namespace skts
