#include "pulseforge/models/train.hpp"

#include <algorithm>
#include <cmath>

#include "pulseforge/diffcore/adam.hpp"

namespace pulseforge::models {

using namespace diffcore;

void TrainConfig::validate() const {
  if (epochs < 0) throw InvalidInputError("TrainConfig: epochs must be >= 0");
  if (batch_size < 2) throw InvalidInputError("TrainConfig: batch_size must be >= 2");
  if (!(lr > 0.0)) throw InvalidInputError("TrainConfig: lr must be positive");
  if (lambda < 0.0) throw InvalidInputError("TrainConfig: lambda must be >= 0");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    throw InvalidInputError("TrainConfig: split_ratio must lie in (0, 1)");
}

namespace {

Tensor gather_rows(const Tensor& data, const std::uint32_t* idx, int count) {
  const int len = data.dim(1);
  Tensor out({count, len});
  for (int i = 0; i < count; ++i)
    std::copy(data.v.begin() + static_cast<std::ptrdiff_t>(idx[i]) * len,
              data.v.begin() + static_cast<std::ptrdiff_t>(idx[i] + 1) * len,
              out.v.begin() + static_cast<std::ptrdiff_t>(i) * len);
  return out;
}

void shuffle_indices(std::vector<std::uint32_t>& idx, util::Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
}

double validation_mse(ModelParams& mp, const Tensor& data,
                      const std::vector<std::uint32_t>& val_idx, int batch_size) {
  double se = 0.0;
  std::size_t count = 0;
  const int len = data.dim(1);
  for (std::size_t b0 = 0; b0 < val_idx.size(); b0 += batch_size) {
    int b = static_cast<int>(std::min<std::size_t>(batch_size, val_idx.size() - b0));
    Tensor batch = gather_rows(data, val_idx.data() + b0, b);
    Tape tape;
    ModelBinding binding(tape, mp, false);
    Var x = tape.input(batch);
    Var codes = binding.encode(x);
    if (mp.kind == ModelKind::BetaVae) codes = slice_cols(codes, 0, mp.arch.latent_dim);
    Var recon = binding.decode(codes);
    const Tensor& rv = recon.value();
    for (std::size_t i = 0; i < rv.size(); ++i) {
      double d = rv[i] - batch[i];
      se += d * d;
    }
    count += rv.size();
  }
  (void)len;
  return se / static_cast<double>(count);
}

}  // namespace

TrainResult train(const Tensor& profiles, const ArchConfig& arch, ModelKind kind,
                  const TrainConfig& config) {
  config.validate();
  arch.validate();
  if (profiles.rank() != 2 || profiles.dim(1) != arch.input_len)
    throw ShapeError("train: expected profiles [n, input_len]");
  const int n = profiles.dim(0);
  if (n < config.batch_size)
    throw InvalidInputError("train: dataset smaller than one batch");

  TrainResult result;
  result.model = init_model(arch, kind, config.seed, config.beta);
  ModelParams& mp = result.model;

  // deterministic 80:20 split
  std::vector<std::uint32_t> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  {
    util::Rng rng(util::derive_seed(config.seed, 0, 0x5e117));
    shuffle_indices(order, rng);
  }
  const int n_train = std::max(1, static_cast<int>(std::floor(config.split_ratio * n)));
  result.train_indices.assign(order.begin(), order.begin() + n_train);
  result.val_indices.assign(order.begin() + n_train, order.end());

  AdamState adam(config.lr);
  std::vector<Tensor*> param_ptrs;
  {
    std::vector<Tensor> snapshot;
    for (auto& p : mp.params) snapshot.push_back(p.t);
    adam.init(snapshot);
    for (auto& p : mp.params) param_ptrs.push_back(&p.t);
  }

  const std::vector<double> scales = imq_scales(arch.latent_dim, config.imq_scale_factors);
  const int dz = arch.latent_dim;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::uint32_t> idx = result.train_indices;
    {
      util::Rng rng(util::derive_seed(config.seed, epoch + 1, 0x5f1e));
      shuffle_indices(idx, rng);
    }
    double epoch_recon = 0.0, epoch_reg = 0.0;
    int n_batches = 0;
    for (std::size_t b0 = 0; b0 + config.batch_size <= idx.size(); b0 += config.batch_size) {
      Tensor batch = gather_rows(profiles, idx.data() + b0, config.batch_size);
      util::Rng draw_rng(util::derive_seed(config.seed, step, 0xd4a3));

      Tape tape;
      ModelBinding binding(tape, mp, true);
      Var x = tape.input(std::move(batch));
      LossParts parts;
      Var loss;
      Tensor draws({config.batch_size, dz});
      for (auto& v : draws.v) v = draw_rng.normal();
      if (kind == ModelKind::Wae)
        loss = wae_objective(binding, x, draws, config.lambda, scales, &parts);
      else
        loss = vae_objective(binding, x, draws, config.beta, &parts);

      if (!std::isfinite(parts.total))
        throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) +
                              " step " + std::to_string(step));

      tape.backward(loss);
      std::vector<Tensor> grads = binding.parameter_grads();
      std::vector<const Tensor*> grad_ptrs;
      for (auto& g : grads) grad_ptrs.push_back(&g);
      adam_step(adam, param_ptrs, grad_ptrs);

      epoch_recon += parts.recon;
      epoch_reg += parts.reg;
      ++n_batches;
      ++step;
    }
    result.history.recon.push_back(epoch_recon / std::max(1, n_batches));
    result.history.reg.push_back(epoch_reg / std::max(1, n_batches));
    result.history.val.push_back(
        validation_mse(mp, profiles, result.val_indices, config.batch_size));
  }

  mp.snap_to_f32();
  return result;
}

}  // namespace pulseforge::models
