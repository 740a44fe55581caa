#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulseforge/diffcore/tensor.hpp"

namespace pulseforge::models {

enum class ModelKind { Wae, BetaVae };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

// Convolutional encoder/decoder layout. Every block halves the length
// (stride 2) and is conv -> batch norm -> leaky ReLU with an optional
// strided 1x1 projection skip. The decoder mirrors with transposed convs
// and ends in a 1-channel conv + tanh.
struct ArchConfig {
  int input_len = 512;
  int latent_dim = 32;
  std::vector<int> channels = {16, 32, 64, 128};
  std::vector<int> kernels = {7, 5, 5, 3};
  std::vector<int> strides = {2, 2, 2, 2};
  bool use_residual = true;

  int n_blocks() const { return static_cast<int>(channels.size()); }
  int bottleneck_len() const;  // input_len / product(strides)
  void validate() const;
};

// A reduced-width configuration for CPU-scale experiments.
ArchConfig desk_arch(int latent_dim = 32);

struct NamedTensor {
  std::string name;
  diffcore::Tensor t;
};

struct ModelParams {
  ArchConfig arch;
  ModelKind kind = ModelKind::Wae;
  double beta = 1.0;  // only meaningful for BetaVae
  std::vector<NamedTensor> params;
  std::vector<NamedTensor> buffers;  // batch-norm running statistics

  diffcore::Tensor& param(const std::string& name);
  diffcore::Tensor& buffer(const std::string& name);
  const diffcore::Tensor& param(const std::string& name) const;
  const diffcore::Tensor& buffer(const std::string& name) const;

  std::size_t parameter_count() const;
  // Rounds every parameter and buffer to the nearest f32 value (the
  // checkpoint storage grid), making save/load round-trips bit-exact.
  void snap_to_f32();
};

// Builds freshly initialized parameters; deterministic in seed.
ModelParams init_model(const ArchConfig& arch, ModelKind kind, std::uint64_t seed,
                       double beta = 1.0);

}  // namespace pulseforge::models
