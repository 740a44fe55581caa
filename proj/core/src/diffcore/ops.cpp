#include "pulseforge/diffcore/ops.hpp"

#include <cmath>
#include <memory>

#include "pulseforge/util/parallel.hpp"

namespace pulseforge::diffcore {

namespace {

Tape& tape_of(Var a) {
  if (!a.tape) throw Error("op on detached Var");
  return *a.tape;
}

void accumulate(Tensor* g, const Tensor& delta) {
  if (!g) return;
  for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += delta[i];
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  check_same_shape(av, bv, "add");
  Tensor out(av.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return t.node(std::move(out), {a, b},
                [](const Tensor& g, const std::vector<const Tensor*>&,
                   const std::vector<Tensor*>& pg) {
                  accumulate(pg[0], g);
                  accumulate(pg[1], g);
                });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  check_same_shape(av, bv, "mul");
  Tensor out(av.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return t.node(std::move(out), {a, b},
                [](const Tensor& g, const std::vector<const Tensor*>& pv,
                   const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i] * (*pv[1])[i];
                  if (pg[1])
                    for (std::size_t i = 0; i < g.size(); ++i) (*pg[1])[i] += g[i] * (*pv[0])[i];
                });
}

Var scale_shift(Var x, double alpha, double beta) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  Tensor out(xv.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * xv[i] + beta;
  return t.node(std::move(out), {x},
                [alpha](const Tensor& g, const std::vector<const Tensor*>&,
                        const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += alpha * g[i];
                });
}

Var vexp(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  auto out = std::make_shared<Tensor>(xv.shape);
  for (std::size_t i = 0; i < out->size(); ++i) (*out)[i] = std::exp(xv[i]);
  Tensor value = *out;
  return t.node(std::move(value), {x},
                [out](const Tensor& g, const std::vector<const Tensor*>&,
                      const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i] * (*out)[i];
                });
}

Var vtanh(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  auto out = std::make_shared<Tensor>(xv.shape);
  for (std::size_t i = 0; i < out->size(); ++i) (*out)[i] = std::tanh(xv[i]);
  Tensor value = *out;
  return t.node(std::move(value), {x},
                [out](const Tensor& g, const std::vector<const Tensor*>&,
                      const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      double y = (*out)[i];
                      (*pg[0])[i] += g[i] * (1.0 - y * y);
                    }
                });
}

Var leaky_relu(Var x, double slope) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  Tensor out(xv.shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] >= 0.0 ? xv[i] : slope * xv[i];
  return t.node(std::move(out), {x},
                [slope](const Tensor& g, const std::vector<const Tensor*>& pv,
                        const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i)
                      (*pg[0])[i] += g[i] * ((*pv[0])[i] >= 0.0 ? 1.0 : slope);
                });
}

Var relu(Var x) { return leaky_relu(x, 0.0); }

Var reshape(Var x, std::vector<int> shape) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (numel(shape) != xv.size()) throw ShapeError("reshape: element count mismatch");
  Tensor out(std::move(shape), xv.v);
  return t.node(std::move(out), {x},
                [](const Tensor& g, const std::vector<const Tensor*>&,
                   const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i];
                });
}

Var slice_cols(Var x, int c0, int c1) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (xv.rank() != 2) throw ShapeError("slice_cols: rank-2 input required");
  const int B = xv.dim(0), F = xv.dim(1);
  if (c0 < 0 || c1 > F || c0 >= c1) throw ShapeError("slice_cols: bad column range");
  Tensor out({B, c1 - c0});
  for (int b = 0; b < B; ++b)
    for (int c = c0; c < c1; ++c) out[b * (c1 - c0) + (c - c0)] = xv[b * F + c];
  return t.node(std::move(out), {x},
                [B, F, c0, c1](const Tensor& g, const std::vector<const Tensor*>&,
                               const std::vector<Tensor*>& pg) {
                  if (!pg[0]) return;
                  for (int b = 0; b < B; ++b)
                    for (int c = c0; c < c1; ++c)
                      (*pg[0])[b * F + c] += g[b * (c1 - c0) + (c - c0)];
                });
}

Var concat_rows(const std::vector<Var>& xs) {
  if (xs.empty()) throw ShapeError("concat_rows: empty input");
  Tape& t = tape_of(xs[0]);
  const std::size_t d = xs[0].value().size();
  const int n = static_cast<int>(xs.size());
  Tensor out({n, static_cast<int>(d)});
  for (int r = 0; r < n; ++r) {
    const Tensor& xv = xs[r].value();
    if (xv.size() != d) throw ShapeError("concat_rows: row length mismatch");
    for (std::size_t i = 0; i < d; ++i) out[r * d + i] = xv[i];
  }
  return t.node(std::move(out), xs,
                [d](const Tensor& g, const std::vector<const Tensor*>&,
                    const std::vector<Tensor*>& pg) {
                  for (std::size_t r = 0; r < pg.size(); ++r) {
                    if (!pg[r]) continue;
                    for (std::size_t i = 0; i < d; ++i) (*pg[r])[i] += g[r * d + i];
                  }
                });
}

Var sum(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += xv[i];
  return t.node(Tensor::scalar(s), {x},
                [](const Tensor& g, const std::vector<const Tensor*>&,
                   const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < pg[0]->size(); ++i) (*pg[0])[i] += g[0];
                });
}

Var weighted_sum(Var x, const Tensor& w) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (w.size() != xv.size()) throw ShapeError("weighted_sum: weight length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += w[i] * xv[i];
  auto wp = std::make_shared<Tensor>(w);
  return t.node(Tensor::scalar(s), {x},
                [wp](const Tensor& g, const std::vector<const Tensor*>&,
                     const std::vector<Tensor*>& pg) {
                  if (pg[0])
                    for (std::size_t i = 0; i < pg[0]->size(); ++i)
                      (*pg[0])[i] += g[0] * (*wp)[i];
                });
}

Var mse(Var a, Var b) {
  Tape& t = tape_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  check_same_shape(av, bv, "mse");
  const double inv_n = 1.0 / static_cast<double>(av.size());
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    double d = av[i] - bv[i];
    s += d * d;
  }
  return t.node(Tensor::scalar(s * inv_n), {a, b},
                [inv_n](const Tensor& g, const std::vector<const Tensor*>& pv,
                        const std::vector<Tensor*>& pg) {
                  const Tensor& av = *pv[0];
                  const Tensor& bv = *pv[1];
                  double c = 2.0 * inv_n * g[0];
                  if (pg[0])
                    for (std::size_t i = 0; i < av.size(); ++i)
                      (*pg[0])[i] += c * (av[i] - bv[i]);
                  if (pg[1])
                    for (std::size_t i = 0; i < av.size(); ++i)
                      (*pg[1])[i] -= c * (av[i] - bv[i]);
                });
}

Var affine(Var x, Var w, Var b) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (xv.rank() != 2 || wv.rank() != 2 || bv.rank() != 1)
    throw ShapeError("affine: expected x[B,Fin], w[Fin,Fout], b[Fout]");
  const int B = xv.dim(0), Fin = xv.dim(1), Fout = wv.dim(1);
  if (wv.dim(0) != Fin || bv.dim(0) != Fout) throw ShapeError("affine: dimension mismatch");

  Tensor out({B, Fout});
  util::parallel_for(B, [&](int i) {
    const double* xr = xv.v.data() + static_cast<std::size_t>(i) * Fin;
    double* yr = out.v.data() + static_cast<std::size_t>(i) * Fout;
    for (int o = 0; o < Fout; ++o) yr[o] = bv[o];
    for (int k = 0; k < Fin; ++k) {
      double xk = xr[k];
      const double* wr = wv.v.data() + static_cast<std::size_t>(k) * Fout;
      for (int o = 0; o < Fout; ++o) yr[o] += xk * wr[o];
    }
  });

  return t.node(std::move(out), {x, w, b},
                [B, Fin, Fout](const Tensor& g, const std::vector<const Tensor*>& pv,
                               const std::vector<Tensor*>& pg) {
                  const Tensor& xv = *pv[0];
                  const Tensor& wv = *pv[1];
                  if (pg[0]) {  // dx = g . w^T
                    util::parallel_for(B, [&](int i) {
                      const double* gr = g.v.data() + static_cast<std::size_t>(i) * Fout;
                      double* dxr = pg[0]->v.data() + static_cast<std::size_t>(i) * Fin;
                      for (int k = 0; k < Fin; ++k) {
                        const double* wr = wv.v.data() + static_cast<std::size_t>(k) * Fout;
                        double acc = 0.0;
                        for (int o = 0; o < Fout; ++o) acc += gr[o] * wr[o];
                        dxr[k] += acc;
                      }
                    });
                  }
                  if (pg[1]) {  // dw = x^T . g; each input row of dw owned by one task
                    util::parallel_for(Fin, [&](int k) {
                      double* dwr = pg[1]->v.data() + static_cast<std::size_t>(k) * Fout;
                      for (int i = 0; i < B; ++i) {
                        double xk = xv[static_cast<std::size_t>(i) * Fin + k];
                        const double* gr = g.v.data() + static_cast<std::size_t>(i) * Fout;
                        for (int o = 0; o < Fout; ++o) dwr[o] += xk * gr[o];
                      }
                    });
                  }
                  if (pg[2]) {
                    for (int i = 0; i < B; ++i)
                      for (int o = 0; o < Fout; ++o)
                        (*pg[2])[o] += g[static_cast<std::size_t>(i) * Fout + o];
                  }
                });
}

Var conv1d(Var x, Var w, Var b, int stride, int pad_left, int pad_right) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (xv.rank() != 3 || wv.rank() != 3 || bv.rank() != 1)
    throw ShapeError("conv1d: expected x[B,Cin,L], w[Cout,Cin,K], b[Cout]");
  const int B = xv.dim(0), Cin = xv.dim(1), L = xv.dim(2);
  const int Cout = wv.dim(0), K = wv.dim(2);
  if (wv.dim(1) != Cin || bv.dim(0) != Cout) throw ShapeError("conv1d: dimension mismatch");
  if (stride < 1) throw ShapeError("conv1d: stride must be >= 1");
  const int Lout = (L + pad_left + pad_right - K) / stride + 1;
  if (Lout < 1) throw ShapeError("conv1d: empty output");

  auto x_at = [Cin, L](const Tensor& xt, int bi, int ci, int pos) -> double {
    if (pos < 0 || pos >= L) return 0.0;
    return xt[(static_cast<std::size_t>(bi) * Cin + ci) * L + pos];
  };

  Tensor out({B, Cout, Lout});
  util::parallel_for(B * Cout, [&](int idx) {
    int bi = idx / Cout, co = idx % Cout;
    double* yr = out.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
    for (int l = 0; l < Lout; ++l) yr[l] = bv[co];
    for (int ci = 0; ci < Cin; ++ci) {
      const double* wr = wv.v.data() + (static_cast<std::size_t>(co) * Cin + ci) * K;
      const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * Cin + ci) * L;
      for (int k = 0; k < K; ++k) {
        double wk = wr[k];
        if (wk == 0.0) continue;
        int base = k - pad_left;
        int l0 = std::max(0, (-base + stride - 1) / stride);
        int l1 = std::min(Lout, base >= L ? 0 : (L - 1 - base) / stride + 1);
        for (int l = l0; l < l1; ++l) yr[l] += wk * xr[base + l * stride];
      }
    }
  });

  return t.node(
      std::move(out), {x, w, b},
      [=](const Tensor& g, const std::vector<const Tensor*>& pv,
          const std::vector<Tensor*>& pg) {
        const Tensor& xv = *pv[0];
        const Tensor& wv = *pv[1];
        if (pg[0]) {  // dx: each (b, ci) row owned by one task
          util::parallel_for(B * Cin, [&](int idx) {
            int bi = idx / Cin, ci = idx % Cin;
            double* dxr = pg[0]->v.data() + (static_cast<std::size_t>(bi) * Cin + ci) * L;
            for (int co = 0; co < Cout; ++co) {
              const double* wr = wv.v.data() + (static_cast<std::size_t>(co) * Cin + ci) * K;
              const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
              for (int k = 0; k < K; ++k) {
                double wk = wr[k];
                if (wk == 0.0) continue;
                int base = k - pad_left;
                int l0 = std::max(0, (-base + stride - 1) / stride);
                int l1 = std::min(Lout, base >= L ? 0 : (L - 1 - base) / stride + 1);
                for (int l = l0; l < l1; ++l) dxr[base + l * stride] += wk * gr[l];
              }
            }
          });
        }
        if (pg[1]) {  // dw: each co slab owned by one task
          util::parallel_for(Cout, [&](int co) {
            for (int ci = 0; ci < Cin; ++ci) {
              double* dwr = pg[1]->v.data() + (static_cast<std::size_t>(co) * Cin + ci) * K;
              for (int bi = 0; bi < B; ++bi) {
                const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
                for (int k = 0; k < K; ++k) {
                  double acc = 0.0;
                  for (int l = 0; l < Lout; ++l)
                    acc += gr[l] * x_at(xv, bi, ci, l * stride + k - pad_left);
                  dwr[k] += acc;
                }
              }
            }
          });
        }
        if (pg[2]) {
          for (int bi = 0; bi < B; ++bi)
            for (int co = 0; co < Cout; ++co) {
              const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
              double acc = 0.0;
              for (int l = 0; l < Lout; ++l) acc += gr[l];
              (*pg[2])[co] += acc;
            }
        }
      });
}

Var conv1d_transpose(Var x, Var w, Var b, int stride, int pad, int out_pad) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (xv.rank() != 3 || wv.rank() != 3 || bv.rank() != 1)
    throw ShapeError("conv1d_transpose: expected x[B,Cin,L], w[Cin,Cout,K], b[Cout]");
  const int B = xv.dim(0), Cin = xv.dim(1), L = xv.dim(2);
  const int Cout = wv.dim(1), K = wv.dim(2);
  if (wv.dim(0) != Cin || bv.dim(0) != Cout)
    throw ShapeError("conv1d_transpose: dimension mismatch");
  const int Lout = (L - 1) * stride + K - 2 * pad + out_pad;
  if (Lout < 1) throw ShapeError("conv1d_transpose: empty output");

  Tensor out({B, Cout, Lout});
  // gather form: out[b,co,j] = sum over (k,l) with l*stride + k - pad == j
  util::parallel_for(B * Cout, [&](int idx) {
    int bi = idx / Cout, co = idx % Cout;
    double* yr = out.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
    for (int j = 0; j < Lout; ++j) yr[j] = bv[co];
    for (int ci = 0; ci < Cin; ++ci) {
      const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * Cin + ci) * L;
      const double* wr = wv.v.data() + (static_cast<std::size_t>(ci) * Cout + co) * K;
      for (int k = 0; k < K; ++k) {
        double wk = wr[k];
        if (wk == 0.0) continue;
        // j = l*stride + k - pad for l in [0, L)
        int jbase = k - pad;
        for (int l = 0; l < L; ++l) {
          int j = jbase + l * stride;
          if (j >= 0 && j < Lout) yr[j] += wk * xr[l];
        }
      }
    }
  });

  return t.node(
      std::move(out), {x, w, b},
      [=](const Tensor& g, const std::vector<const Tensor*>& pv,
          const std::vector<Tensor*>& pg) {
        const Tensor& xv = *pv[0];
        const Tensor& wv = *pv[1];
        if (pg[0]) {  // dx[b,ci,l] = sum_{co,k} g[b,co,l*stride+k-pad] w[ci,co,k]
          util::parallel_for(B * Cin, [&](int idx) {
            int bi = idx / Cin, ci = idx % Cin;
            double* dxr = pg[0]->v.data() + (static_cast<std::size_t>(bi) * Cin + ci) * L;
            for (int co = 0; co < Cout; ++co) {
              const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
              const double* wr = wv.v.data() + (static_cast<std::size_t>(ci) * Cout + co) * K;
              for (int l = 0; l < L; ++l) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                  int j = l * stride + k - pad;
                  if (j >= 0 && j < Lout) acc += gr[j] * wr[k];
                }
                dxr[l] += acc;
              }
            }
          });
        }
        if (pg[1]) {  // dw[ci,co,k] = sum_{b,l} x[b,ci,l] g[b,co,l*stride+k-pad]
          util::parallel_for(Cin, [&](int ci) {
            for (int co = 0; co < Cout; ++co) {
              double* dwr = pg[1]->v.data() + (static_cast<std::size_t>(ci) * Cout + co) * K;
              for (int bi = 0; bi < B; ++bi) {
                const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * Cin + ci) * L;
                const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
                for (int k = 0; k < K; ++k) {
                  double acc = 0.0;
                  for (int l = 0; l < L; ++l) {
                    int j = l * stride + k - pad;
                    if (j >= 0 && j < Lout) acc += xr[l] * gr[j];
                  }
                  dwr[k] += acc;
                }
              }
            }
          });
        }
        if (pg[2]) {
          for (int bi = 0; bi < B; ++bi)
            for (int co = 0; co < Cout; ++co) {
              const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * Cout + co) * Lout;
              double acc = 0.0;
              for (int j = 0; j < Lout; ++j) acc += gr[j];
              (*pg[2])[co] += acc;
            }
        }
      });
}

Var batchnorm1d(Var x, Var gamma, Var beta, Tensor& running_mean, Tensor& running_var,
                bool train, double momentum, double eps) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (xv.rank() != 3) throw ShapeError("batchnorm1d: expected x[B,C,L]");
  const int B = xv.dim(0), C = xv.dim(1), L = xv.dim(2);
  const Tensor& gv = gamma.value();
  const Tensor& bv = beta.value();
  if (gv.size() != static_cast<std::size_t>(C) || bv.size() != static_cast<std::size_t>(C) ||
      running_mean.size() != static_cast<std::size_t>(C) ||
      running_var.size() != static_cast<std::size_t>(C))
    throw ShapeError("batchnorm1d: per-channel parameter size mismatch");

  const std::size_t n_red = static_cast<std::size_t>(B) * L;
  auto mean = std::make_shared<Tensor>(std::vector<int>{C});
  auto invstd = std::make_shared<Tensor>(std::vector<int>{C});
  auto xhat = std::make_shared<Tensor>(std::vector<int>{B, C, L});

  util::parallel_for(C, [&](int c) {
    double m, var;
    if (train) {
      double s = 0.0;
      for (int bi = 0; bi < B; ++bi) {
        const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
        for (int l = 0; l < L; ++l) s += xr[l];
      }
      m = s / static_cast<double>(n_red);
      double sv = 0.0;
      for (int bi = 0; bi < B; ++bi) {
        const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
        for (int l = 0; l < L; ++l) {
          double d = xr[l] - m;
          sv += d * d;
        }
      }
      var = sv / static_cast<double>(n_red);
      running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * m;
      running_var[c] = (1.0 - momentum) * running_var[c] + momentum * var;
    } else {
      m = running_mean[c];
      var = running_var[c];
    }
    (*mean)[c] = m;
    (*invstd)[c] = 1.0 / std::sqrt(var + eps);
  });

  Tensor out({B, C, L});
  util::parallel_for(B * C, [&](int idx) {
    int bi = idx / C, c = idx % C;
    const double* xr = xv.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
    double* hr = xhat->v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
    double* yr = out.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
    double m = (*mean)[c], is = (*invstd)[c], ga = gv[c], be = bv[c];
    for (int l = 0; l < L; ++l) {
      hr[l] = (xr[l] - m) * is;
      yr[l] = ga * hr[l] + be;
    }
  });

  return t.node(
      std::move(out), {x, gamma, beta},
      [=](const Tensor& g, const std::vector<const Tensor*>& pv,
          const std::vector<Tensor*>& pg) {
        const Tensor& gv = *pv[1];
        // per-channel reductions, each channel owned by one task
        Tensor sum_g({C}), sum_gh({C});
        util::parallel_for(C, [&](int c) {
          double sg = 0.0, sgh = 0.0;
          for (int bi = 0; bi < B; ++bi) {
            const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
            const double* hr = xhat->v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
            for (int l = 0; l < L; ++l) {
              sg += gr[l];
              sgh += gr[l] * hr[l];
            }
          }
          sum_g[c] = sg;
          sum_gh[c] = sgh;
        });
        if (pg[1])
          for (int c = 0; c < C; ++c) (*pg[1])[c] += sum_gh[c];
        if (pg[2])
          for (int c = 0; c < C; ++c) (*pg[2])[c] += sum_g[c];
        if (pg[0]) {
          const double inv_n = 1.0 / static_cast<double>(n_red);
          util::parallel_for(B * C, [&](int idx) {
            int bi = idx / C, c = idx % C;
            const double* gr = g.v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
            const double* hr = xhat->v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
            double* dxr = pg[0]->v.data() + (static_cast<std::size_t>(bi) * C + c) * L;
            double k = gv[c] * (*invstd)[c];
            for (int l = 0; l < L; ++l) {
              if (train)
                dxr[l] += k * (gr[l] - inv_n * sum_g[c] - hr[l] * inv_n * sum_gh[c]);
              else
                dxr[l] += k * gr[l];
            }
          });
        }
      });
}

}  // namespace pulseforge::diffcore
