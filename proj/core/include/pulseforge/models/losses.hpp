#pragma once

#include "pulseforge/models/network.hpp"
#include "pulseforge/util/rng.hpp"

namespace pulseforge::models {

// IMQ kernel scales C = factor * 2 * latent_dim; 2*d_z matches E||z-z'||^2
// under the standard normal prior.
std::vector<double> imq_scales(int latent_dim,
                               const std::vector<double>& factors = {0.1, 0.2, 0.5, 1.0, 2.0,
                                                                     5.0, 10.0});

// Squared MMD between two equal-size sample batches [n, d] with the IMQ
// kernel k(z, z') = C / (C + ||z - z'||^2) averaged over scales. All three
// kernel sums exclude the diagonal (divisor n(n-1)), so the estimator is
// unbiased and exactly zero for identical batches.
double mmd_imq(const diffcore::Tensor& z, const diffcore::Tensor& prior,
               const std::vector<double>& scales);

// Tape-recorded variant; gradients flow to both batches.
diffcore::Var mmd_imq(diffcore::Var z, diffcore::Var prior, const std::vector<double>& scales);

struct LossParts {
  double total = 0.0;
  double recon = 0.0;
  double reg = 0.0;  // raw MMD^2 (WAE) or mean per-sample KL (BetaVae)
};

// total = MSE(x, decode(encode(x))) + lambda * MMD^2(codes, prior_draws).
// prior_draws must be [B, latent_dim] fresh standard normals.
diffcore::Var wae_objective(ModelBinding& binding, diffcore::Var x,
                            const diffcore::Tensor& prior_draws, double lambda,
                            const std::vector<double>& scales, LossParts* parts = nullptr);

// total = MSE + beta * mean_b KL(N(mu_b, diag sigma_b^2) || N(0, I)); the
// reparameterized z = mu + sigma * eps uses the supplied eps draws [B, d_z].
diffcore::Var vae_objective(ModelBinding& binding, diffcore::Var x,
                            const diffcore::Tensor& eps_draws, double beta,
                            LossParts* parts = nullptr);

// Convenience one-shot evaluations (fresh tape, fresh prior/eps draws).
LossParts wae_loss(ModelParams& mp, const diffcore::Tensor& batch, util::Rng& rng, double lambda,
                   const std::vector<double>& scales, bool train_mode = true);
LossParts vae_loss(ModelParams& mp, const diffcore::Tensor& batch, util::Rng& rng, double beta,
                   bool train_mode = true);

}  // namespace pulseforge::models
