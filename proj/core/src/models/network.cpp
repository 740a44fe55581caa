#include "pulseforge/models/network.hpp"

namespace pulseforge::models {

using namespace diffcore;

ModelBinding::ModelBinding(Tape& tape, ModelParams& mp, bool train)
    : tape_(&tape), mp_(&mp), train_(train) {
  pvars_.reserve(mp.params.size());
  for (auto& p : mp.params)
    pvars_.push_back(train ? tape.param(p.t) : tape.input(p.t));
}

Var ModelBinding::param_var(const std::string& name) {
  for (std::size_t i = 0; i < mp_->params.size(); ++i)
    if (mp_->params[i].name == name) return pvars_[i];
  throw Error("ModelBinding: no parameter named " + name);
}

std::vector<Tensor> ModelBinding::parameter_grads() const {
  std::vector<Tensor> out;
  out.reserve(pvars_.size());
  for (Var v : pvars_) out.push_back(tape_->grad(v));
  return out;
}

Var ModelBinding::encode(Var x) {
  const ArchConfig& arch = mp_->arch;
  const auto& shape = x.shape();
  int B = shape[0];
  if (shape.size() == 2) x = reshape(x, {B, 1, arch.input_len});
  if (x.shape() != std::vector<int>{B, 1, arch.input_len})
    throw ShapeError("encode: expected [B, input_len] profiles");

  for (int i = 0; i < arch.n_blocks(); ++i) {
    std::string p = "enc" + std::to_string(i);
    int k = arch.kernels[i], pad = (k - 1) / 2, stride = arch.strides[i];
    Var h = conv1d(x, param_var(p + ".conv.w"), param_var(p + ".conv.b"), stride, pad, pad);
    h = batchnorm1d(h, param_var(p + ".bn.gamma"), param_var(p + ".bn.beta"),
                    mp_->buffer(p + ".bn.mean"), mp_->buffer(p + ".bn.var"), train_);
    if (arch.use_residual) {
      Var s = conv1d(x, param_var(p + ".skip.w"), param_var(p + ".skip.b"), stride, 0, 0);
      h = add(h, s);
    }
    x = leaky_relu(h);
  }
  int flat = arch.channels.back() * arch.bottleneck_len();
  x = reshape(x, {B, flat});
  return affine(x, param_var("enc.fc.w"), param_var("enc.fc.b"));
}

Var ModelBinding::decode(Var z) {
  const ArchConfig& arch = mp_->arch;
  const auto& shape = z.shape();
  if (shape.size() != 2 || shape[1] != arch.latent_dim)
    throw ShapeError("decode: expected [n, latent_dim] codes");
  int B = shape[0];
  const int n = arch.n_blocks();

  Var x = affine(z, param_var("dec.fc.w"), param_var("dec.fc.b"));
  x = reshape(x, {B, arch.channels.back(), arch.bottleneck_len()});
  for (int i = 0; i < n; ++i) {
    std::string p = "dec" + std::to_string(i);
    int k = arch.kernels[n - 1 - i], pad = (k - 1) / 2, stride = arch.strides[n - 1 - i];
    Var h = conv1d_transpose(x, param_var(p + ".tconv.w"), param_var(p + ".tconv.b"), stride,
                             pad, 1);
    h = batchnorm1d(h, param_var(p + ".bn.gamma"), param_var(p + ".bn.beta"),
                    mp_->buffer(p + ".bn.mean"), mp_->buffer(p + ".bn.var"), train_);
    if (arch.use_residual) {
      Var s = conv1d_transpose(x, param_var(p + ".skip.w"), param_var(p + ".skip.b"), stride, 0, 0);
      h = add(h, s);
    }
    x = leaky_relu(h);
  }
  x = conv1d(x, param_var("dec.out.w"), param_var("dec.out.b"), 1, 3, 3);
  x = vtanh(x);
  return reshape(x, {B, arch.input_len});
}

namespace {
constexpr int kEvalChunk = 256;
}

Tensor encode_batch(ModelParams& mp, const Tensor& profiles) {
  if (profiles.rank() != 2 || profiles.dim(1) != mp.arch.input_len)
    throw ShapeError("encode_batch: expected [n, input_len]");
  const int n = profiles.dim(0), dz = mp.arch.latent_dim;
  Tensor out({n, dz});
  for (int b0 = 0; b0 < n; b0 += kEvalChunk) {
    int b1 = std::min(n, b0 + kEvalChunk);
    Tensor chunk({b1 - b0, mp.arch.input_len});
    std::copy(profiles.v.begin() + static_cast<std::ptrdiff_t>(b0) * mp.arch.input_len,
              profiles.v.begin() + static_cast<std::ptrdiff_t>(b1) * mp.arch.input_len,
              chunk.v.begin());
    Tape tape;
    ModelBinding binding(tape, mp, false);
    Var codes = binding.encode(tape.input(std::move(chunk)));
    const Tensor& cv = codes.value();
    for (int b = 0; b < b1 - b0; ++b)
      for (int d = 0; d < dz; ++d)
        out[(static_cast<std::size_t>(b0) + b) * dz + d] = cv[b * cv.dim(1) + d];
  }
  return out;
}

Tensor decode_batch(ModelParams& mp, const Tensor& codes) {
  if (codes.rank() != 2 || codes.dim(1) != mp.arch.latent_dim)
    throw ShapeError("decode_batch: expected [n, latent_dim]");
  const int n = codes.dim(0), len = mp.arch.input_len;
  Tensor out({n, len});
  for (int b0 = 0; b0 < n; b0 += kEvalChunk) {
    int b1 = std::min(n, b0 + kEvalChunk);
    Tensor chunk({b1 - b0, mp.arch.latent_dim});
    std::copy(codes.v.begin() + static_cast<std::ptrdiff_t>(b0) * mp.arch.latent_dim,
              codes.v.begin() + static_cast<std::ptrdiff_t>(b1) * mp.arch.latent_dim,
              chunk.v.begin());
    Tape tape;
    ModelBinding binding(tape, mp, false);
    Var recon = binding.decode(tape.input(std::move(chunk)));
    std::copy(recon.value().v.begin(), recon.value().v.end(),
              out.v.begin() + static_cast<std::ptrdiff_t>(b0) * len);
  }
  return out;
}

}  // namespace pulseforge::models
