#include "pulseforge/diffcore/tape.hpp"

namespace pulseforge::diffcore {

const Tensor& Var::value() const { return tape->value(*this); }
const std::vector<int>& Var::shape() const { return tape->value(*this).shape; }

void Tape::check(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw Error("Var does not belong to this tape");
}

Var Tape::input(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, false, {}, nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, true, {}, nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::node(Tensor value, const std::vector<Var>& parents, BackwardFn backward) {
  bool rg = false;
  std::vector<int> ids;
  ids.reserve(parents.size());
  for (Var p : parents) {
    check(p);
    if (p.id >= static_cast<int>(nodes_.size()))
      throw Error("parent created after child");
    rg = rg || nodes_[p.id].requires_grad;
    ids.push_back(p.id);
  }
  nodes_.push_back(Node{std::move(value), Tensor{}, rg, std::move(ids),
                        rg ? std::move(backward) : nullptr});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

Tensor Tape::grad(Var v) const {
  check(v);
  const Node& n = nodes_[v.id];
  if (n.grad.size() == 0) return Tensor(n.value.shape);
  return n.grad;
}

bool Tape::requires_grad(Var v) const {
  check(v);
  return nodes_[v.id].requires_grad;
}

void Tape::backward(Var loss) {
  check(loss);
  if (!nodes_[loss.id].value.is_scalar()) throw ShapeError("backward: loss must be scalar");

  for (auto& n : nodes_) n.grad = Tensor{};
  nodes_[loss.id].grad = Tensor::scalar(1.0);

  std::vector<const Tensor*> pvals;
  std::vector<Tensor*> pgrads;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
    pvals.clear();
    pgrads.clear();
    for (int p : n.parents) {
      Node& pn = nodes_[p];
      pvals.push_back(&pn.value);
      if (pn.requires_grad) {
        if (pn.grad.size() == 0) pn.grad = Tensor(pn.value.shape);
        pgrads.push_back(&pn.grad);
      } else {
        pgrads.push_back(nullptr);
      }
    }
    n.backward(n.grad, pvals, pgrads);
  }
}

}  // namespace pulseforge::diffcore
