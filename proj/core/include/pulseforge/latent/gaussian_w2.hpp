#pragma once

#include "pulseforge/latent/gmm.hpp"

namespace pulseforge::latent {

// Closed-form 2-Wasserstein distance between Gaussians:
//   W2^2 = ||mu_i - mu_j||^2 + Tr(S_i + S_j - 2 (S_i^{1/2} S_j S_i^{1/2})^{1/2}).
// Inputs are symmetrized; matrices that are not PSD within tolerance raise
// InvalidInputError. Matrix square roots use symmetric eigendecomposition
// with eigenvalues clamped at 0.
double gaussian_w2(const Tensor& mu_i, const Tensor& sigma_i, const Tensor& mu_j,
                   const Tensor& sigma_j);

// Pairwise W2 between mixture components, divided by the largest entry:
// symmetric, zero diagonal, max off-diagonal exactly 1. Throws
// InvalidInputError when all components coincide (nothing to normalize).
Tensor normalized_pairwise_w2(const GmmModel& gmm);

}  // namespace pulseforge::latent
