#pragma once

#include "pulseforge/diffcore/ops.hpp"
#include "pulseforge/models/arch.hpp"

namespace pulseforge::models {

// Binds ModelParams onto a tape for one forward/backward episode. In train
// mode parameters become differentiable leaves and batch-norm updates its
// running statistics; in eval mode the whole network is a pure function.
class ModelBinding {
 public:
  ModelBinding(diffcore::Tape& tape, ModelParams& mp, bool train);

  // x: [B, input_len] or [B, 1, input_len]. Returns [B, latent_dim] codes
  // for the WAE, [B, 2*latent_dim] (mean | logvar) for the BetaVae head.
  diffcore::Var encode(diffcore::Var x);
  // z: [B, latent_dim] -> [B, input_len], values in (-1, 1).
  diffcore::Var decode(diffcore::Var z);

  diffcore::Var param_var(const std::string& name);
  // Gradients aligned with mp.params order (zeros where unreached).
  std::vector<diffcore::Tensor> parameter_grads() const;

  diffcore::Tape& tape() { return *tape_; }
  ModelParams& model() { return *mp_; }
  bool train_mode() const { return train_; }

 private:
  diffcore::Tape* tape_;
  ModelParams* mp_;
  bool train_;
  std::vector<diffcore::Var> pvars_;  // aligned with mp_->params
};

// Eval-mode conveniences on a scratch tape. Input rows of length input_len.
// encode_batch returns [n, latent_dim]; the BetaVae head is reduced to its
// mean. decode_batch returns [n, input_len].
diffcore::Tensor encode_batch(ModelParams& mp, const diffcore::Tensor& profiles);
diffcore::Tensor decode_batch(ModelParams& mp, const diffcore::Tensor& codes);

}  // namespace pulseforge::models
