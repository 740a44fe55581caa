#include "pulseforge/latent/pca.hpp"

#include <Eigen/Dense>

namespace pulseforge::latent {

PcaModel pca_fit(const Tensor& data) {
  if (data.rank() != 2) throw ShapeError("pca_fit: expected [n, d]");
  const int n = data.dim(0), d = data.dim(1);
  if (n < 2) throw InvalidInputError("pca_fit: need at least 2 samples");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
      data.v.data(), n, d);
  Eigen::VectorXd mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("pca_fit: eigendecomposition failed");

  PcaModel model;
  model.mean = Tensor({d});
  model.axes = Tensor({d, d});
  model.variances = Tensor({d});
  for (int i = 0; i < d; ++i) model.mean[i] = mean(i);

  // eigenvalues ascending from Eigen; emit descending with the sign rule
  for (int k = 0; k < d; ++k) {
    int src = d - 1 - k;
    Eigen::VectorXd axis = eig.eigenvectors().col(src);
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(axis(i)) > std::abs(axis(arg))) arg = i;
    if (axis(arg) < 0.0) axis = -axis;
    for (int i = 0; i < d; ++i) model.axes[static_cast<std::size_t>(i) * d + k] = axis(i);
    model.variances[k] = std::max(0.0, eig.eigenvalues()(src));
  }
  return model;
}

Tensor pca_project(const PcaModel& model, const Tensor& data, int k) {
  if (data.rank() != 2) throw ShapeError("pca_project: expected [n, d]");
  const int n = data.dim(0), d = data.dim(1);
  if (model.mean.dim(0) != d) throw ShapeError("pca_project: dimension mismatch with model");
  if (k < 1 || k > d) throw InvalidInputError("pca_project: k out of range");

  Tensor out({n, k});
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i)
        acc += (data[static_cast<std::size_t>(r) * d + i] - model.mean[i]) *
               model.axes[static_cast<std::size_t>(i) * d + c];
      out[static_cast<std::size_t>(r) * k + c] = acc;
    }
  return out;
}

Tensor pca_reconstruct(const PcaModel& model, const Tensor& coords) {
  if (coords.rank() != 2) throw ShapeError("pca_reconstruct: expected [n, k]");
  const int n = coords.dim(0), k = coords.dim(1);
  const int d = model.mean.dim(0);
  if (k > d) throw InvalidInputError("pca_reconstruct: k out of range");

  Tensor out({n, d});
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < d; ++i) {
      double acc = model.mean[i];
      for (int c = 0; c < k; ++c)
        acc += coords[static_cast<std::size_t>(r) * k + c] *
               model.axes[static_cast<std::size_t>(i) * d + c];
      out[static_cast<std::size_t>(r) * d + i] = acc;
    }
  return out;
}

}  // namespace pulseforge::latent
