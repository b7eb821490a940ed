#include "skts/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace skts {

StateSpaceModel StateSpaceModel::diagonal(const RealVec& ar_coeff, const RealVec& amp_var,
                                          double meas_noise_var) {
  if (ar_coeff.size() != amp_var.size()) {
    throw std::invalid_argument("ar_coeff and amp_var length mismatch");
  }
  const int m = static_cast<int>(ar_coeff.size());
  StateSpaceModel model;
  model.dim = m;
  model.state_transition = ar_coeff.cast<Complex>().asDiagonal();
  RealVec v = (1.0 - ar_coeff.array().square()) * amp_var.array();
  model.process_noise_cov = v.cast<Complex>().asDiagonal();
  model.meas_noise_var = meas_noise_var;
  model.prior_mean = Vec::Zero(m);
  model.prior_cov = amp_var.cast<Complex>().asDiagonal();
  model.diagonal_dynamics = true;
  return model;
}

StateSpaceModel StateSpaceModel::diagonal(int dim, double ar_coeff, double amp_var,
                                          double meas_noise_var) {
  return diagonal(RealVec::Constant(dim, ar_coeff), RealVec::Constant(dim, amp_var),
                  meas_noise_var);
}

namespace {

bool hermitian_psd(const Mat& x, std::string* why) {
  if (x.rows() != x.cols()) {
    *why = "not square";
    return false;
  }
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    *why = "not Hermitian";
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(detail::hermitian_part(x),
                                        Eigen::EigenvaluesOnly);
  const double max_eig = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (es.eigenvalues().minCoeff() < -kPsdTol * std::max(max_eig, 1e-300)) {
    *why = "not PSD";
    return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate_model(const StateSpaceModel& model) {
  std::vector<std::string> violations;
  const int m = model.dim;
  if (m <= 0) violations.push_back("dim must be positive");
  if (model.state_transition.rows() != m || model.state_transition.cols() != m) {
    violations.push_back("state_transition must be M x M");
  }
  std::string why;
  if (model.process_noise_cov.rows() != m || model.process_noise_cov.cols() != m) {
    violations.push_back("process_noise_cov must be M x M");
  } else if (!hermitian_psd(model.process_noise_cov, &why)) {
    violations.push_back("process_noise_cov not PSD (" + why + ")");
  }
  if (!(model.meas_noise_var > 0.0)) {
    violations.push_back("meas_noise_var must be positive");
  }
  if (model.prior_mean.size() != m) violations.push_back("prior_mean must have length M");
  if (model.prior_cov.rows() != m || model.prior_cov.cols() != m) {
    violations.push_back("prior_cov must be M x M");
  } else if (!hermitian_psd(model.prior_cov, &why)) {
    violations.push_back("prior_cov not PSD (" + why + ")");
  }
  return violations;
}

void MeasurementBlock::check_consistent() const {
  if (observations.size() != system_matrices.size()) {
    throw std::invalid_argument("observations / system_matrices length mismatch");
  }
  if (observations.empty()) throw std::invalid_argument("empty block");
  const auto n = observations[0].size();
  const auto m = system_matrices[0].cols();
  if (n < 1 || m < 1) throw std::invalid_argument("N and M must be >= 1");
  for (size_t t = 0; t < observations.size(); ++t) {
    if (observations[t].size() != n) throw std::invalid_argument("inconsistent y_n dimension");
    if (system_matrices[t].rows() != n || system_matrices[t].cols() != m) {
      throw std::invalid_argument("inconsistent B_n shape");
    }
  }
}

SupportVector::SupportVector(std::vector<bool> bits, int sparsity)
    : bits_(std::move(bits)), sparsity_(sparsity) {
  const int count = static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
  if (count != sparsity_) {
    throw std::invalid_argument("support bit count does not equal declared sparsity");
  }
}

SupportVector SupportVector::all_ones(int m) {
  return SupportVector(std::vector<bool>(m, true), m);
}

SupportVector SupportVector::all_zeros(int m) {
  return SupportVector(std::vector<bool>(m, false), 0);
}

SupportVector SupportVector::from_indices(int m, std::vector<int> indices) {
  std::vector<bool> bits(m, false);
  for (int j : indices) {
    if (j < 0 || j >= m) throw std::invalid_argument("support index out of range");
    if (bits[j]) throw std::invalid_argument("duplicate support index");
    bits[j] = true;
  }
  return SupportVector(std::move(bits), static_cast<int>(indices.size()));
}

std::vector<int> SupportVector::indices() const {
  std::vector<int> out;
  out.reserve(sparsity_);
  for (int j = 0; j < size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

RealVec SupportVector::mask() const {
  RealVec m(size());
  for (int j = 0; j < size(); ++j) m[j] = bits_[j] ? 1.0 : 0.0;
  return m;
}

}  // namespace skts
