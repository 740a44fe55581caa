#pragma once

#include <cstdint>

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::latent {

using diffcore::Tensor;

struct EvalReport {
  double mse = 0.0;
  double snr_db = 0.0;
  double cor = 0.0;
  std::vector<double> cor_per_batch;
};

// mean over samples of 10 log10(||x||^2 / ||x - xhat||^2); exact
// reconstructions are capped at 300 dB per sample (logged to stderr).
double snr_db(const Tensor& originals, const Tensor& reconstructions);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Mean over seeded batches of the Pearson correlation between pairwise
// Euclidean distances in data space and in latent space. Batches whose
// distance set has zero variance are skipped and logged.
double distance_correlation(const Tensor& profiles, const Tensor& codes, int n_batches,
                            int batch_size, std::uint64_t seed,
                            std::vector<double>* per_batch = nullptr);

// Pearson r between each column of coords and the energy vector.
std::vector<double> energy_correlation(const Tensor& coords, const std::vector<double>& energies);

}  // namespace pulseforge::latent
