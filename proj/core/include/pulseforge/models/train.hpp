#pragma once

#include <cstdint>

#include "pulseforge/models/losses.hpp"

namespace pulseforge::models {

struct TrainConfig {
  int epochs = 150;
  int batch_size = 64;
  double lr = 1e-3;
  double lambda = 0.1;  // MMD weight (WAE)
  double beta = 1.0;    // KL weight (BetaVae)
  std::vector<double> imq_scale_factors = {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  double split_ratio = 0.8;  // train fraction of the 80:20 split
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> recon;  // epoch-mean reconstruction loss (train batches)
  std::vector<double> reg;    // epoch-mean MMD^2 or KL
  std::vector<double> val;    // held-out reconstruction MSE, eval mode
};

struct TrainResult {
  ModelParams model;
  TrainHistory history;
  std::vector<std::uint32_t> train_indices;
  std::vector<std::uint32_t> val_indices;
};

// Trains on profile rows [n, input_len]. The 80:20 split is a seeded shuffle,
// minibatches are re-shuffled per epoch, incomplete trailing batches are
// skipped, and the prior/eps draws come from per-step seeded streams, so the
// result depends only on (data, arch, kind, config). Non-finite losses abort
// with DivergenceError. Parameters are snapped to the f32 checkpoint grid at
// the end.
TrainResult train(const diffcore::Tensor& profiles, const ArchConfig& arch, ModelKind kind,
                  const TrainConfig& config);

}  // namespace pulseforge::models
