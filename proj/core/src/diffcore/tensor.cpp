#include "pulseforge/diffcore/tensor.hpp"

#include <string>

namespace pulseforge::diffcore {

std::size_t numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> s, std::vector<double> data)
    : shape(std::move(s)), v(std::move(data)) {
  if (v.size() != numel(shape)) throw ShapeError("tensor data length does not match shape");
}

double Tensor::scalar_value() const {
  if (!is_scalar()) throw ShapeError("scalar_value on non-scalar tensor");
  return v[0];
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!same_shape(a, b)) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace pulseforge::diffcore
