#pragma once

#include <cstddef>
#include <vector>

#include "pulseforge/common.hpp"

namespace pulseforge::diffcore {

std::size_t numel(const std::vector<int>& shape);

// Dense row-major value array, double precision throughout.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)), v(numel(shape), 0.0) {}
  Tensor(std::vector<int> s, std::vector<double> data);

  static Tensor scalar(double x) { return Tensor({1}, {x}); }
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape); }

  std::size_t size() const { return v.size(); }
  int dim(std::size_t i) const { return shape[i]; }
  int rank() const { return static_cast<int>(shape.size()); }
  bool is_scalar() const { return size() == 1; }
  double scalar_value() const;

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

bool same_shape(const Tensor& a, const Tensor& b);
void check_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace pulseforge::diffcore
