#include "skts/kalman.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace skts;
using namespace skts::testing;

namespace {

StateSpaceModel scalar_model() {
  StateSpaceModel model;
  model.dim = 1;
  model.state_transition = Mat::Constant(1, 1, 0.8);
  model.process_noise_cov = Mat::Constant(1, 1, 0.36);
  model.meas_noise_var = 0.25;
  model.prior_mean = Vec::Zero(1);
  model.prior_cov = Mat::Constant(1, 1, 1.0);
  return model;
}

MeasurementBlock scalar_block(std::initializer_list<double> ys) {
  MeasurementBlock mb;
  for (double y : ys) {
    mb.observations.push_back(Vec::Constant(1, y));
    mb.system_matrices.push_back(Mat::Constant(1, 1, 1.0));
  }
  return mb;
}

double mean_rel_err(const PosteriorStats& a, const PosteriorStats& b) {
  double worst = 0.0;
  for (size_t n = 0; n < a.means.size(); ++n) {
    const double denom = std::max(b.means[n].norm(), 1e-12);
    worst = std::max(worst, (a.means[n] - b.means[n]).norm() / denom);
  }
  return worst;
}

double cov_rel_err(const PosteriorStats& a, const PosteriorStats& b) {
  double worst = 0.0;
  for (size_t n = 0; n < a.covs.size(); ++n) {
    const double denom = std::max(b.covs[n].norm(), 1e-12);
    worst = std::max(worst, (a.covs[n] - b.covs[n]).norm() / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("scalar forward filter step matches hand values") {
  auto fs = forward_filter(scalar_model(), scalar_block({1.0}), SupportVector::all_ones(1));
  CHECK(fs.predicted_means[0][0].real() == doctest::Approx(0.0));
  CHECK(fs.predicted_covs[0](0, 0).real() == doctest::Approx(1.0));
  CHECK(fs.gains[0](0, 0).real() == doctest::Approx(0.8));
  CHECK(fs.filtered_means[0][0].real() == doctest::Approx(0.8));
  CHECK(fs.filtered_covs[0](0, 0).real() == doctest::Approx(0.2));
}

TEST_CASE("all-zero support carries no information") {
  std::mt19937_64 rng(7);
  auto inst = random_instance(4, 3, 4, 0, rng);
  auto fs = forward_filter(inst.model, inst.block, SupportVector::all_zeros(4));
  for (int n = 0; n < 4; ++n) {
    CHECK(fs.gains[n].norm() == doctest::Approx(0.0));
    CHECK((fs.filtered_means[n] - fs.predicted_means[n]).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("zero observation matrix leaves predicted stats unchanged") {
  std::mt19937_64 rng(8);
  auto inst = random_instance(3, 2, 3, 2, rng);
  for (auto& b : inst.block.system_matrices) b.setZero();
  auto fs = forward_filter(inst.model, inst.block, inst.support);
  for (int n = 0; n < 3; ++n) {
    CHECK((fs.filtered_means[n] - fs.predicted_means[n]).norm() == doctest::Approx(0.0));
    CHECK((fs.filtered_covs[n] - fs.predicted_covs[n]).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("T=1 smoothing equals filtering") {
  auto model = scalar_model();
  auto fs = forward_filter(model, scalar_block({1.0}), SupportVector::all_ones(1));
  auto post = backward_smooth(model, fs);
  CHECK(post.means[0][0].real() == doctest::Approx(0.8));
  CHECK(post.covs[0](0, 0).real() == doctest::Approx(0.2));
}

TEST_CASE("independent states get no backward correction") {
  std::mt19937_64 rng(9);
  auto inst = random_instance(3, 2, 4, 3, rng);
  inst.model.state_transition.setZero();
  inst.model.process_noise_cov = Mat::Identity(3, 3);
  auto fs = forward_filter(inst.model, inst.block, inst.support);
  auto post = backward_smooth(inst.model, fs);
  for (int n = 0; n < 4; ++n) {
    CHECK((post.means[n] - fs.filtered_means[n]).norm() == doctest::Approx(0.0));
    CHECK((post.covs[n] - fs.filtered_covs[n]).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("smoother matches the batch-LMMSE oracle on a 3-state block") {
  std::mt19937_64 rng(10);
  auto inst = random_instance(3, 2, 3, 3, rng);
  auto post = smooth(inst.model, inst.block, inst.support);
  auto oracle = batch_lmmse_oracle(inst.model, inst.block, inst.support);
  CHECK(mean_rel_err(post, oracle) < 1e-8);
  CHECK(cov_rel_err(post, oracle) < 1e-7);
}

TEST_CASE("oracle equivalence over random instances with random supports") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 5);   // up to 6
    const int t_len = 1 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 4);
    const int k = static_cast<int>(rng() % (m + 1));
    auto inst = random_instance(m, n, t_len, k, rng);
    auto post = smooth(inst.model, inst.block, inst.support);
    auto oracle = batch_lmmse_oracle(inst.model, inst.block, inst.support);
    CHECK(mean_rel_err(post, oracle) < 1e-8);
    CHECK(cov_rel_err(post, oracle) < 1e-7);
  }
}

TEST_CASE("reduced-support path equals the full recursion for diagonal models") {
  std::mt19937_64 rng(12);
  StateSpaceModel model = StateSpaceModel::diagonal(6, 0.7, 1.5, 0.2);
  MeasurementBlock block;
  for (int i = 0; i < 4; ++i) {
    block.system_matrices.push_back(random_complex_matrix(3, 6, rng));
    block.observations.push_back(random_complex_vector(3, rng));
  }
  auto support = SupportVector::from_indices(6, {1, 4});
  auto fast = smooth(model, block, support);
  auto full = backward_smooth(model, forward_filter(model, block, support));
  CHECK(mean_rel_err(fast, full) < 1e-10);
  CHECK(cov_rel_err(fast, full) < 1e-10);
}

TEST_CASE("zero support posterior equals the prior marginals") {
  std::mt19937_64 rng(13);
  auto inst = random_instance(3, 2, 3, 0, rng);
  auto post = batch_lmmse_oracle(inst.model, inst.block, inst.support);
  CHECK((post.means[0] - inst.model.prior_mean).norm() < 1e-10);
  CHECK((post.covs[0] - inst.model.prior_cov).norm() < 1e-9);
}

TEST_CASE("uninformative measurements leave the prior untouched") {
  std::mt19937_64 rng(14);
  auto inst = random_instance(3, 2, 3, 3, rng);
  inst.model.meas_noise_var = 1e12;
  auto post = batch_lmmse_oracle(inst.model, inst.block, inst.support);
  CHECK((post.means[0] - inst.model.prior_mean).norm() < 1e-6);
  CHECK((post.covs[0] - inst.model.prior_cov).norm() < 1e-6);
}

TEST_CASE("covariance shrinks under an informative update") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_instance(4, 3, 3, 1 + static_cast<int>(rng() % 4), rng);
    auto fs = forward_filter(inst.model, inst.block, inst.support);
    for (int n = 0; n < 3; ++n) {
      Mat diff = fs.predicted_covs[n] - fs.filtered_covs[n];
      Eigen::SelfAdjointEigenSolver<Mat> es(detail::hermitian_part(diff), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-9 * std::max(1.0, diff.norm()));
    }
  }
}

TEST_CASE("smoothed covariances stay Hermitian") {
  std::mt19937_64 rng(16);
  auto inst = random_instance(5, 3, 5, 3, rng);
  auto post = smooth(inst.model, inst.block, inst.support);
  for (const Mat& cov : post.covs) {
    CHECK((cov - cov.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("oracle refuses oversized joint systems") {
  std::mt19937_64 rng(17);
  auto inst = random_instance(4, 2, 3, 2, rng);
  CHECK_THROWS_AS(batch_lmmse_oracle(inst.model, inst.block, inst.support, 8),
                  std::invalid_argument);
}
