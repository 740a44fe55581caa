#include "pulseforge/diffcore/adam.hpp"

#include <cmath>

namespace pulseforge::diffcore {

void AdamState::init(const std::vector<Tensor>& params) {
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.push_back(Tensor(p.shape));
    v.push_back(Tensor(p.shape));
  }
  step_count = 0;
}

void adam_step(AdamState& state, std::vector<Tensor*> params,
               const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeError("adam_step: parameter/gradient/moment count mismatch");
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    check_same_shape(p, g, "adam_step");
    check_same_shape(p, m, "adam_step");
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
      double mhat = m[k] / bc1;
      double vhat = v[k] / bc2;
      p[k] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace pulseforge::diffcore
