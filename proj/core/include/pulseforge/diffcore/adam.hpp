#pragma once

#include <vector>

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::diffcore {

// Bias-corrected Adam with per-tensor moment buffers.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long step_count = 0;
  std::vector<Tensor> m, v;

  explicit AdamState(double learning_rate = 1e-3) : lr(learning_rate) {}
  void init(const std::vector<Tensor>& params);
};

void adam_step(AdamState& state, std::vector<Tensor*> params,
               const std::vector<const Tensor*>& grads);

}  // namespace pulseforge::diffcore
