#pragma once

#include <cstdint>

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::latent {

using diffcore::Tensor;

// Full-covariance Gaussian mixture over latent codes.
struct GmmModel {
  int n_components = 0;
  int dim = 0;
  std::vector<double> weights;      // K, sums to 1
  std::vector<Tensor> means;        // K x [d]
  std::vector<Tensor> covariances;  // K x [d, d], symmetric PD

  // log-likelihood after each EM iteration (ll[0] is the initial value)
  std::vector<double> log_likelihood;

  void validate() const;
};

// Expectation-Maximization with k-means++-style seeding, a covariance
// eigenvalue floor of 1e-6, and reinitialization of emptied components from
// a random datum (logged to stderr). Stops when the log-likelihood improves
// by less than tol or after max_iter iterations.
GmmModel gmm_fit_em(const Tensor& codes, int n_components, std::uint64_t seed,
                    int max_iter = 300, double tol = 1e-7);

// Draws n samples: component by weight, then N(mu_k, Sigma_k) via Cholesky.
Tensor gmm_sample(const GmmModel& gmm, std::size_t n, std::uint64_t seed);

}  // namespace pulseforge::latent
