#pragma once

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::latent {

using diffcore::Tensor;

// Principal axes of a sample matrix [n, d]: mean, orthonormal axes (columns,
// by descending explained variance), variances from the unbiased sample
// covariance. Sign convention: the largest-magnitude entry of each axis is
// positive.
struct PcaModel {
  Tensor mean;       // [d]
  Tensor axes;       // [d, d] column k = axis k
  Tensor variances;  // [d] descending, clamped at 0
};

PcaModel pca_fit(const Tensor& data);

// (rows - mean) projected on the first k axes -> [n, k].
Tensor pca_project(const PcaModel& model, const Tensor& data, int k);

// mean + coords . axes[:, :k]^T -> [n, d].
Tensor pca_reconstruct(const PcaModel& model, const Tensor& coords);

}  // namespace pulseforge::latent
