#pragma once

#include <functional>
#include <vector>

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::diffcore {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  const std::vector<int>& shape() const;
};

// Accumulates into parent_grads[i] (nullptr when that parent needs no
// gradient). parent_values are the forward values, in parent order.
using BackwardFn = std::function<void(const Tensor& grad_out,
                                      const std::vector<const Tensor*>& parent_values,
                                      const std::vector<Tensor*>& parent_grads)>;

// Append-only record of a forward computation; creation order is the
// topological order used for reverse accumulation.
class Tape {
 public:
  Var input(Tensor value);  // leaf, no gradient
  Var param(Tensor value);  // leaf, gradient accumulated

  // Generic recorded op; also the extension point for fused ops whose
  // backward is computed analytically (MMD estimator, quantile W2).
  Var node(Tensor value, const std::vector<Var>& parents, BackwardFn backward);

  void backward(Var loss);

  const Tensor& value(Var v) const;
  // Gradient of the last backward() w.r.t. v; zeros if v was unreachable.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // empty until touched
    bool requires_grad = false;
    std::vector<int> parents;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;

  void check(Var v) const;
};

}  // namespace pulseforge::diffcore
