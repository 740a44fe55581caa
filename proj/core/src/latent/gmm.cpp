#include "pulseforge/latent/gmm.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>

#include "pulseforge/util/parallel.hpp"
#include "pulseforge/util/rng.hpp"

namespace pulseforge::latent {

namespace {

constexpr double kCovFloor = 1e-6;

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Lift eigenvalues to at least kCovFloor; leaves healthy matrices untouched.
MatrixXd floor_covariance(const MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (cov + cov.transpose()));
  double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig >= kCovFloor) return 0.5 * (cov + cov.transpose());
  VectorXd vals = eig.eigenvalues().cwiseMax(kCovFloor);
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

struct ComponentDist {
  Eigen::LLT<MatrixXd> llt;
  double log_norm;  // -0.5 (d log 2pi + log det)

  void set(const MatrixXd& cov, int d) {
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw Error("gmm: covariance not positive definite after flooring");
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    log_norm = -0.5 * (d * std::log(2.0 * constants::pi) + logdet);
  }

  double log_pdf(const VectorXd& x, const VectorXd& mu) const {
    VectorXd y = llt.matrixL().solve(x - mu);
    return log_norm - 0.5 * y.squaredNorm();
  }
};

}  // namespace

void GmmModel::validate() const {
  double s = 0.0;
  for (double w : weights) s += w;
  if (std::abs(s - 1.0) > 1e-9) throw InvalidInputError("GmmModel: weights must sum to 1");
}

GmmModel gmm_fit_em(const Tensor& codes, int n_components, std::uint64_t seed, int max_iter,
                    double tol) {
  if (codes.rank() != 2) throw ShapeError("gmm_fit_em: expected [n, d]");
  const int n = codes.dim(0), d = codes.dim(1);
  const int K = n_components;
  if (K < 1 || n < K) throw InvalidInputError("gmm_fit_em: need n >= n_components >= 1");

  RowMajorMap X(codes.v.data(), n, d);
  util::Rng rng(util::derive_seed(seed, 0, 0x6e1));

  // global statistics for initialization and reseeding
  VectorXd global_mean = X.colwise().mean();
  MatrixXd centered = X.rowwise() - global_mean.transpose();
  MatrixXd global_cov =
      floor_covariance(centered.transpose() * centered / static_cast<double>(std::max(1, n - 1)));

  // k-means++-style seeding
  std::vector<int> centers;
  centers.push_back(static_cast<int>(rng.uniform_index(n)));
  VectorXd min_d2 = (X.rowwise() - X.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < K) {
    double total = min_d2.sum();
    int pick;
    if (!(total > 0.0)) {
      pick = static_cast<int>(rng.uniform_index(n));
    } else {
      double u = rng.uniform() * total, acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += min_d2(i);
        if (acc >= u) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(pick);
    min_d2 = min_d2.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
  }

  std::vector<double> weights(K, 1.0 / K);
  std::vector<VectorXd> means(K);
  std::vector<MatrixXd> covs(K, global_cov);
  for (int k = 0; k < K; ++k) means[k] = X.row(centers[k]);

  GmmModel out;
  out.n_components = K;
  out.dim = d;

  std::vector<ComponentDist> dists(K);
  MatrixXd resp(n, K);
  std::vector<double> row_ll(n);

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter <= max_iter; ++iter) {
    // E-step
    for (int k = 0; k < K; ++k) dists[k].set(covs[k], d);
    util::parallel_for(n, [&](int i) {
      VectorXd xi = X.row(i);
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        double l = std::log(weights[k]) + dists[k].log_pdf(xi, means[k]);
        resp(i, k) = l;
        mx = std::max(mx, l);
      }
      double s = 0.0;
      for (int k = 0; k < K; ++k) s += std::exp(resp(i, k) - mx);
      double lse = mx + std::log(s);
      row_ll[i] = lse;
      for (int k = 0; k < K; ++k) resp(i, k) = std::exp(resp(i, k) - lse);
    });
    double ll = 0.0;
    for (int i = 0; i < n; ++i) ll += row_ll[i];
    out.log_likelihood.push_back(ll);

    if (iter == max_iter) break;
    if (std::isfinite(prev_ll) && ll - prev_ll < tol && ll >= prev_ll) break;
    prev_ll = ll;

    // M-step
    bool reseeded = false;
    for (int k = 0; k < K; ++k) {
      double nk = resp.col(k).sum();
      if (!(nk > 1e-10 * n) || !std::isfinite(nk)) {
        int pick = static_cast<int>(rng.uniform_index(n));
        std::fprintf(stderr, "[gmm] component %d emptied at iteration %d, reseeding from row %d\n",
                     k, iter, pick);
        means[k] = X.row(pick);
        covs[k] = global_cov;
        weights[k] = 1.0 / n;
        reseeded = true;
        continue;
      }
      weights[k] = nk / n;
      VectorXd mu = (resp.col(k).transpose() * X).transpose() / nk;
      MatrixXd c = MatrixXd::Zero(d, d);
      for (int i = 0; i < n; ++i) {
        VectorXd diff = X.row(i).transpose() - mu;
        c.noalias() += resp(i, k) * diff * diff.transpose();
      }
      means[k] = mu;
      covs[k] = floor_covariance(c / nk);
    }
    if (reseeded) {  // renormalize weights after manual edits
      double s = 0.0;
      for (double w : weights) s += w;
      for (auto& w : weights) w /= s;
    }
  }

  out.weights = weights;
  for (int k = 0; k < K; ++k) {
    Tensor mu({d}), cov({d, d});
    for (int i = 0; i < d; ++i) mu[i] = means[k](i);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) cov[static_cast<std::size_t>(i) * d + j] = covs[k](i, j);
    out.means.push_back(std::move(mu));
    out.covariances.push_back(std::move(cov));
  }
  // exact unit sum for the weights invariant
  double s = 0.0;
  for (double w : out.weights) s += w;
  for (auto& w : out.weights) w /= s;
  return out;
}

Tensor gmm_sample(const GmmModel& gmm, std::size_t n, std::uint64_t seed) {
  gmm.validate();
  const int d = gmm.dim, K = gmm.n_components;
  util::Rng rng(util::derive_seed(seed, 1, 0x6e2));

  std::vector<Eigen::LLT<MatrixXd>> llts(K);
  for (int k = 0; k < K; ++k) {
    RowMajorMap cov(gmm.covariances[k].v.data(), d, d);
    llts[k].compute(MatrixXd(cov));
    if (llts[k].info() != Eigen::Success)
      throw InvalidInputError("gmm_sample: covariance not positive definite");
  }

  Tensor out({static_cast<int>(n), d});
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform(), acc = 0.0;
    int k = K - 1;
    for (int c = 0; c < K; ++c) {
      acc += gmm.weights[c];
      if (u < acc) {
        k = c;
        break;
      }
    }
    VectorXd eps(d);
    for (int j = 0; j < d; ++j) eps(j) = rng.normal();
    VectorXd x = llts[k].matrixL() * eps;
    for (int j = 0; j < d; ++j)
      out[i * d + j] = gmm.means[k][j] + x(j);
  }
  return out;
}

}  // namespace pulseforge::latent
