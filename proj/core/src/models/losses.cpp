#include "pulseforge/models/losses.hpp"

#include <cmath>
#include <memory>

#include "pulseforge/util/parallel.hpp"

namespace pulseforge::models {

using namespace diffcore;

std::vector<double> imq_scales(int latent_dim, const std::vector<double>& factors) {
  std::vector<double> out;
  out.reserve(factors.size());
  for (double f : factors) out.push_back(f * 2.0 * latent_dim);
  return out;
}

namespace {

struct MmdResult {
  double value = 0.0;
  Tensor dz, dp;  // gradients when requested
};

// Sums over i != j of k(z_i, z_j) + k(p_i, p_j) - k(z_i, p_j) - k(z_j, p_i),
// divided by n(n-1) and averaged over scales.
MmdResult mmd_core(const Tensor& z, const Tensor& p, const std::vector<double>& scales,
                   bool want_grad) {
  if (z.rank() != 2 || p.rank() != 2 || z.dim(0) != p.dim(0) || z.dim(1) != p.dim(1))
    throw ShapeError("mmd_imq: batches must share shape [n, d]");
  const int n = z.dim(0), d = z.dim(1);
  if (n < 2) throw InvalidInputError("mmd_imq: need at least 2 samples per batch");
  if (scales.empty()) throw InvalidInputError("mmd_imq: no kernel scales");

  const double norm = 1.0 / (static_cast<double>(n) * (n - 1) * scales.size());
  auto sqdist = [&](const Tensor& a, int i, const Tensor& b, int j) {
    const double* ai = a.v.data() + static_cast<std::size_t>(i) * d;
    const double* bj = b.v.data() + static_cast<std::size_t>(j) * d;
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      double diff = ai[k] - bj[k];
      s += diff * diff;
    }
    return s;
  };

  // row sums in fixed order, then a serial reduction: thread-count invariant
  std::vector<double> row_val(n, 0.0);
  MmdResult res;
  if (want_grad) {
    res.dz = Tensor({n, d});
    res.dp = Tensor({n, d});
  }
  util::parallel_for(n, [&](int i) {
    double acc = 0.0;
    double* gzi = want_grad ? res.dz.v.data() + static_cast<std::size_t>(i) * d : nullptr;
    double* gpi = want_grad ? res.dp.v.data() + static_cast<std::size_t>(i) * d : nullptr;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double szz = sqdist(z, i, z, j);
      double spp = sqdist(p, i, p, j);
      double szp = sqdist(z, i, p, j);
      double spz = sqdist(p, i, z, j);  // = szp with roles swapped; kept for the row split
      for (double C : scales) {
        double kzz = C / (C + szz), kpp = C / (C + spp), kzp = C / (C + szp),
               kpz = C / (C + spz);
        acc += kzz + kpp - kzp - kpz;
        if (want_grad) {
          // d k / d z_i = -2 C (z_i - other) / (C + s)^2
          double czz = -2.0 * C / ((C + szz) * (C + szz));
          double czp = -2.0 * C / ((C + szp) * (C + szp));
          double cpp = -2.0 * C / ((C + spp) * (C + spp));
          double cpz = -2.0 * C / ((C + spz) * (C + spz));
          const double* zi = z.v.data() + static_cast<std::size_t>(i) * d;
          const double* zj = z.v.data() + static_cast<std::size_t>(j) * d;
          const double* pi = p.v.data() + static_cast<std::size_t>(i) * d;
          const double* pj = p.v.data() + static_cast<std::size_t>(j) * d;
          for (int k = 0; k < d; ++k) {
            gzi[k] += czz * (zi[k] - zj[k]) - czp * (zi[k] - pj[k]);
            gpi[k] += cpp * (pi[k] - pj[k]) - cpz * (pi[k] - zj[k]);
          }
        }
      }
    }
    row_val[i] = acc;
  });
  double total = 0.0;
  for (double r : row_val) total += r;
  res.value = total * norm;
  if (want_grad) {
    for (auto& g : res.dz.v) g *= norm;
    for (auto& g : res.dp.v) g *= norm;
  }
  return res;
}

}  // namespace

double mmd_imq(const Tensor& z, const Tensor& prior, const std::vector<double>& scales) {
  return mmd_core(z, prior, scales, false).value;
}

Var mmd_imq(Var z, Var prior, const std::vector<double>& scales) {
  Tape& tape = *z.tape;
  MmdResult res = mmd_core(z.value(), prior.value(), scales, true);
  auto dz = std::make_shared<Tensor>(std::move(res.dz));
  auto dp = std::make_shared<Tensor>(std::move(res.dp));
  return tape.node(Tensor::scalar(res.value), {z, prior},
                   [dz, dp](const Tensor& g, const std::vector<const Tensor*>&,
                            const std::vector<Tensor*>& pg) {
                     if (pg[0])
                       for (std::size_t i = 0; i < pg[0]->size(); ++i)
                         (*pg[0])[i] += g[0] * (*dz)[i];
                     if (pg[1])
                       for (std::size_t i = 0; i < pg[1]->size(); ++i)
                         (*pg[1])[i] += g[0] * (*dp)[i];
                   });
}

Var wae_objective(ModelBinding& binding, Var x, const Tensor& prior_draws, double lambda,
                  const std::vector<double>& scales, LossParts* parts) {
  Tape& tape = binding.tape();
  Var codes = binding.encode(x);
  Var recon = binding.decode(codes);
  Var cost = mse(x, recon);
  Var prior = tape.input(prior_draws);
  Var reg = mmd_imq(codes, prior, scales);
  Var total = add(cost, scale_shift(reg, lambda, 0.0));
  if (parts) {
    parts->recon = cost.value().scalar_value();
    parts->reg = reg.value().scalar_value();
    parts->total = total.value().scalar_value();
  }
  return total;
}

Var vae_objective(ModelBinding& binding, Var x, const Tensor& eps_draws, double beta,
                  LossParts* parts) {
  if (binding.model().kind != ModelKind::BetaVae)
    throw InvalidInputError("vae_objective: model kind is not BetaVae");
  Tape& tape = binding.tape();
  const int dz = binding.model().arch.latent_dim;

  Var head = binding.encode(x);
  const int B = head.shape()[0];
  Var mu = slice_cols(head, 0, dz);
  Var logvar = slice_cols(head, dz, 2 * dz);

  Var sigma = vexp(scale_shift(logvar, 0.5, 0.0));
  Var z = add(mu, mul(sigma, tape.input(eps_draws)));
  Var recon = binding.decode(z);
  Var cost = mse(x, recon);

  // KL(N(mu, sigma^2) || N(0, I)) = 1/2 sum(mu^2 + sigma^2 - 1 - logvar), mean over batch
  Var kl_terms = add(add(mul(mu, mu), vexp(logvar)), scale_shift(logvar, -1.0, -1.0));
  Var kl = scale_shift(sum(kl_terms), 0.5 / B, 0.0);

  Var total = add(cost, scale_shift(kl, beta, 0.0));
  if (parts) {
    parts->recon = cost.value().scalar_value();
    parts->reg = kl.value().scalar_value();
    parts->total = total.value().scalar_value();
  }
  return total;
}

namespace {

Tensor normal_draws(util::Rng& rng, int n, int d) {
  Tensor t({n, d});
  for (auto& v : t.v) v = rng.normal();
  return t;
}

}  // namespace

LossParts wae_loss(ModelParams& mp, const Tensor& batch, util::Rng& rng, double lambda,
                   const std::vector<double>& scales, bool train_mode) {
  Tape tape;
  ModelBinding binding(tape, mp, train_mode);
  LossParts parts;
  wae_objective(binding, tape.input(batch), normal_draws(rng, batch.dim(0), mp.arch.latent_dim),
                lambda, scales, &parts);
  return parts;
}

LossParts vae_loss(ModelParams& mp, const Tensor& batch, util::Rng& rng, double beta,
                   bool train_mode) {
  Tape tape;
  ModelBinding binding(tape, mp, train_mode);
  LossParts parts;
  vae_objective(binding, tape.input(batch), normal_draws(rng, batch.dim(0), mp.arch.latent_dim),
                beta, &parts);
  return parts;
}

}  // namespace pulseforge::models
