#include "pulseforge/latent/gaussian_w2.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pulseforge::latent {

namespace {

using Eigen::MatrixXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

MatrixXd check_and_symmetrize(const Tensor& sigma, int d) {
  if (sigma.rank() != 2 || sigma.dim(0) != d || sigma.dim(1) != d)
    throw ShapeError("gaussian_w2: covariance shape mismatch");
  RowMajorMap s(sigma.v.data(), d, d);
  double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw InvalidInputError("gaussian_w2: covariance not symmetric");
  return 0.5 * (MatrixXd(s) + MatrixXd(s).transpose());
}

MatrixXd psd_sqrt(const MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-8 * scale)
    throw InvalidInputError(std::string("gaussian_w2: ") + what + " is not PSD");
  Eigen::VectorXd r = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * r.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double gaussian_w2(const Tensor& mu_i, const Tensor& sigma_i, const Tensor& mu_j,
                   const Tensor& sigma_j) {
  const int d = static_cast<int>(mu_i.size());
  if (mu_j.size() != mu_i.size()) throw ShapeError("gaussian_w2: mean length mismatch");

  MatrixXd si = check_and_symmetrize(sigma_i, d);
  MatrixXd sj = check_and_symmetrize(sigma_j, d);

  double mean_term = 0.0;
  for (int k = 0; k < d; ++k) {
    double diff = mu_i[k] - mu_j[k];
    mean_term += diff * diff;
  }

  MatrixXd root_i = psd_sqrt(si, "sigma_i");
  MatrixXd inner = root_i * sj * root_i;
  MatrixXd cross = psd_sqrt(0.5 * (inner + inner.transpose()), "sigma_i^1/2 sigma_j sigma_i^1/2");

  double trace_term = si.trace() + sj.trace() - 2.0 * cross.trace();
  double w2_sq = mean_term + trace_term;
  return std::sqrt(std::max(0.0, w2_sq));
}

Tensor normalized_pairwise_w2(const GmmModel& gmm) {
  const int K = gmm.n_components;
  if (K < 2) throw InvalidInputError("normalized_pairwise_w2: need at least 2 components");

  Tensor m({K, K});
  double max_entry = 0.0;
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      double w = gaussian_w2(gmm.means[i], gmm.covariances[i], gmm.means[j], gmm.covariances[j]);
      m[static_cast<std::size_t>(i) * K + j] = w;
      m[static_cast<std::size_t>(j) * K + i] = w;
      max_entry = std::max(max_entry, w);
    }
  if (!(max_entry > 0.0))
    throw InvalidInputError("normalized_pairwise_w2: all components identical");
  for (auto& v : m.v) v /= max_entry;
  return m;
}

}  // namespace pulseforge::latent
