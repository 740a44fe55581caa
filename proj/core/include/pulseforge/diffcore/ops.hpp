#pragma once

#include "pulseforge/diffcore/tape.hpp"

namespace pulseforge::diffcore {

// Elementwise
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale_shift(Var x, double alpha, double beta);  // alpha * x + beta
Var vexp(Var x);
Var vtanh(Var x);
Var leaky_relu(Var x, double slope = 0.01);
Var relu(Var x);

// Shape
Var reshape(Var x, std::vector<int> shape);
Var slice_cols(Var x, int c0, int c1);        // [B, F] -> [B, c1-c0]
Var concat_rows(const std::vector<Var>& xs);  // N tensors [d] or [1, d] -> [N, d]

// Reductions
Var sum(Var x);                                // -> [1]
Var weighted_sum(Var x, const Tensor& w);      // dot(w, x) -> [1]
Var mse(Var a, Var b);                         // mean squared error -> [1]

// Linear layers
// x [B, Fin], w [Fin, Fout], b [Fout] -> [B, Fout]
Var affine(Var x, Var w, Var b);
// x [B, Cin, L], w [Cout, Cin, K], b [Cout]; explicit asymmetric padding
Var conv1d(Var x, Var w, Var b, int stride, int pad_left, int pad_right);
// x [B, Cin, L], w [Cin, Cout, K], b [Cout]; Lout = (L-1)*stride + K - 2*pad + out_pad
Var conv1d_transpose(Var x, Var w, Var b, int stride, int pad, int out_pad);

// Batch normalization over (batch, length) per channel; x [B, C, L].
// In train mode the biased batch statistics normalize the activations and
// update running_mean/running_var in place (momentum-weighted); in eval mode
// the running statistics are read and the op is a pure per-sample function.
Var batchnorm1d(Var x, Var gamma, Var beta, Tensor& running_mean, Tensor& running_var,
                bool train, double momentum = 0.1, double eps = 1e-5);

}  // namespace pulseforge::diffcore
