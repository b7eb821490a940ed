// Shared generators for randomized tests.

#pragma once

#include "skts/types.hpp"

#include <random>

namespace skts::testing {

inline Mat random_complex_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Mat out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = Complex(dist(rng), dist(rng));
  return out;
}

inline Vec random_complex_vector(int len, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec out(len);
  for (int i = 0; i < len; ++i) out[i] = Complex(dist(rng), dist(rng));
  return out;
}

inline Mat random_psd(int dim, std::mt19937_64& rng) {
  Mat g = random_complex_matrix(dim, dim, rng);
  return (g * g.adjoint() / dim).eval();
}

inline SupportVector random_support(int dim, int sparsity, std::mt19937_64& rng) {
  std::vector<int> pool(dim);
  for (int i = 0; i < dim; ++i) pool[i] = i;
  for (int i = 0; i < sparsity; ++i) {
    std::uniform_int_distribution<int> dist(i, dim - 1);
    std::swap(pool[i], pool[dist(rng)]);
  }
  return SupportVector::from_indices(dim, {pool.begin(), pool.begin() + sparsity});
}

struct RandomInstance {
  StateSpaceModel model;
  MeasurementBlock block;
  SupportVector support;
};

// Generic complex dynamics with random PSD process noise and prior.
inline RandomInstance random_instance(int m, int n, int t_len, int sparsity,
                                      std::mt19937_64& rng) {
  RandomInstance inst;
  inst.model.dim = m;
  inst.model.state_transition = 0.5 * random_complex_matrix(m, m, rng);
  inst.model.process_noise_cov = random_psd(m, rng);
  inst.model.meas_noise_var = 0.1;
  inst.model.prior_mean = random_complex_vector(m, rng);
  inst.model.prior_cov = random_psd(m, rng);
  inst.support = random_support(m, sparsity, rng);
  for (int i = 0; i < t_len; ++i) {
    inst.block.system_matrices.push_back(random_complex_matrix(n, m, rng));
    inst.block.observations.push_back(random_complex_vector(n, rng));
  }
  return inst;
}

}  // namespace skts::testing
