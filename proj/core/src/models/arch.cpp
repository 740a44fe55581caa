#include "pulseforge/models/arch.hpp"

#include <cmath>

#include "pulseforge/util/rng.hpp"

namespace pulseforge::models {

using diffcore::Tensor;

std::string model_kind_name(ModelKind k) {
  return k == ModelKind::Wae ? "wae" : "bvae";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "wae") return ModelKind::Wae;
  if (name == "bvae") return ModelKind::BetaVae;
  throw InvalidInputError("unknown model kind: " + name);
}

int ArchConfig::bottleneck_len() const {
  int len = input_len;
  for (int s : strides) {
    if (len % s != 0) throw InvalidInputError("ArchConfig: input_len not divisible by strides");
    len /= s;
  }
  return len;
}

void ArchConfig::validate() const {
  if (latent_dim < 1) throw InvalidInputError("ArchConfig: latent_dim must be >= 1");
  if (channels.empty() || channels.size() != kernels.size() || channels.size() != strides.size())
    throw InvalidInputError("ArchConfig: channels/kernels/strides length mismatch");
  for (int k : kernels)
    if (k < 1 || k % 2 == 0) throw InvalidInputError("ArchConfig: kernels must be odd");
  for (int s : strides)
    if (s != 2) throw InvalidInputError("ArchConfig: only stride 2 blocks are supported");
  bottleneck_len();  // throws if not divisible
}

ArchConfig desk_arch(int latent_dim) {
  ArchConfig a;
  a.latent_dim = latent_dim;
  a.channels = {8, 16, 32, 64};
  a.kernels = {7, 5, 5, 3};
  a.strides = {2, 2, 2, 2};
  return a;
}

namespace {

Tensor uniform_init(std::vector<int> shape, int fan_in, util::Rng& rng) {
  Tensor t(std::move(shape));
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t.v) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace

diffcore::Tensor& ModelParams::param(const std::string& name) {
  for (auto& p : params)
    if (p.name == name) return p.t;
  throw Error("ModelParams: no parameter named " + name);
}

diffcore::Tensor& ModelParams::buffer(const std::string& name) {
  for (auto& p : buffers)
    if (p.name == name) return p.t;
  throw Error("ModelParams: no buffer named " + name);
}

const diffcore::Tensor& ModelParams::param(const std::string& name) const {
  return const_cast<ModelParams*>(this)->param(name);
}

const diffcore::Tensor& ModelParams::buffer(const std::string& name) const {
  return const_cast<ModelParams*>(this)->buffer(name);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.t.size();
  return n;
}

void ModelParams::snap_to_f32() {
  for (auto& p : params)
    for (auto& v : p.t.v) v = static_cast<double>(static_cast<float>(v));
  for (auto& b : buffers)
    for (auto& v : b.t.v) v = static_cast<double>(static_cast<float>(v));
}

ModelParams init_model(const ArchConfig& arch, ModelKind kind, std::uint64_t seed, double beta) {
  arch.validate();
  ModelParams mp;
  mp.arch = arch;
  mp.kind = kind;
  mp.beta = beta;
  util::Rng rng(util::derive_seed(seed, 0, 0xa11c));

  const int n = arch.n_blocks();
  const int dz = arch.latent_dim;
  const int head = kind == ModelKind::BetaVae ? 2 * dz : dz;
  const int c_last = arch.channels[n - 1];
  const int l_last = arch.bottleneck_len();

  auto add_param = [&](const std::string& name, Tensor t) {
    mp.params.push_back({name, std::move(t)});
  };
  auto add_bn = [&](const std::string& prefix, int c) {
    Tensor gamma({c}), betap({c}), mean({c}), var({c});
    for (auto& v : gamma.v) v = 1.0;
    for (auto& v : var.v) v = 1.0;
    add_param(prefix + ".gamma", std::move(gamma));
    add_param(prefix + ".beta", std::move(betap));
    mp.buffers.push_back({prefix + ".mean", std::move(mean)});
    mp.buffers.push_back({prefix + ".var", std::move(var)});
  };

  // encoder
  int cin = 1;
  for (int i = 0; i < n; ++i) {
    int cout = arch.channels[i], k = arch.kernels[i];
    add_param("enc" + std::to_string(i) + ".conv.w", uniform_init({cout, cin, k}, cin * k, rng));
    add_param("enc" + std::to_string(i) + ".conv.b", uniform_init({cout}, cin * k, rng));
    add_bn("enc" + std::to_string(i) + ".bn", cout);
    if (arch.use_residual) {
      add_param("enc" + std::to_string(i) + ".skip.w", uniform_init({cout, cin, 1}, cin, rng));
      add_param("enc" + std::to_string(i) + ".skip.b", uniform_init({cout}, cin, rng));
    }
    cin = cout;
  }
  add_param("enc.fc.w", uniform_init({c_last * l_last, head}, c_last * l_last, rng));
  add_param("enc.fc.b", uniform_init({head}, c_last * l_last, rng));

  // decoder
  add_param("dec.fc.w", uniform_init({dz, c_last * l_last}, dz, rng));
  add_param("dec.fc.b", uniform_init({c_last * l_last}, dz, rng));
  int dc = c_last;
  for (int i = 0; i < n; ++i) {
    int cout = i + 1 < n ? arch.channels[n - 2 - i] : arch.channels[0];
    int k = arch.kernels[n - 1 - i];
    add_param("dec" + std::to_string(i) + ".tconv.w", uniform_init({dc, cout, k}, dc * k, rng));
    add_param("dec" + std::to_string(i) + ".tconv.b", uniform_init({cout}, dc * k, rng));
    add_bn("dec" + std::to_string(i) + ".bn", cout);
    if (arch.use_residual) {
      add_param("dec" + std::to_string(i) + ".skip.w", uniform_init({dc, cout, 2}, dc * 2, rng));
      add_param("dec" + std::to_string(i) + ".skip.b", uniform_init({cout}, dc * 2, rng));
    }
    dc = cout;
  }
  add_param("dec.out.w", uniform_init({1, dc, 7}, dc * 7, rng));
  add_param("dec.out.b", uniform_init({1}, dc * 7, rng));
  return mp;
}

}  // namespace pulseforge::models
