#include <cmath>
#include <vector>

#include "pulseforge/common.hpp"
#include "pulseforge/transport/density.hpp"

namespace pulseforge::transport {

namespace {

struct Cdf {
  const TimeGrid* grid;
  std::vector<double> F;  // normalized cumulative trapezoid, F[0] = 0, F[n-1] = 1
  double total;
};

Cdf build_cdf(const std::vector<double>& p, const TimeGrid& grid) {
  const int n = grid.n_points;
  if (static_cast<int>(p.size()) != n) throw ShapeError("w2: value length does not match grid");
  Cdf c;
  c.grid = &grid;
  c.F.resize(n);
  c.F[0] = 0.0;
  for (int i = 1; i < n; ++i) c.F[i] = c.F[i - 1] + 0.5 * (p[i - 1] + p[i]) * grid.delta_t;
  c.total = c.F[n - 1];
  if (!(c.total > 0.0)) throw DegeneratePulseError("w2: density has no positive mass");
  for (auto& v : c.F) v /= c.total;
  return c;
}

struct QuantileSweep {
  const Cdf* cdf;
  int k = 1;  // current segment: F[k-1] < u <= F[k]

  // u must be queried in ascending order
  double eval(double u) {
    const auto& F = cdf->F;
    const int n = static_cast<int>(F.size());
    while (k < n - 1 && F[k] < u) ++k;
    double w = F[k] - F[k - 1];
    return cdf->grid->t(k - 1) + (u - F[k - 1]) / w * cdf->grid->delta_t;
  }

  // adjoint of eval at the segment used for this u
  void accumulate(double u, double dq, std::vector<double>& dF) const {
    const auto& F = cdf->F;
    double w = F[k] - F[k - 1];
    double inv_w2 = 1.0 / (w * w);
    dF[k - 1] += dq * cdf->grid->delta_t * (u - F[k]) * inv_w2;
    dF[k] -= dq * cdf->grid->delta_t * (u - F[k - 1]) * inv_w2;
  }
};

// dL/dF -> dL/dp through normalization and the cumulative trapezoid.
void backprop_cdf(const Cdf& c, const std::vector<double>& dF, std::vector<double>& dp) {
  const int n = static_cast<int>(c.F.size());
  const double dt = c.grid->delta_t;

  // F_k = G_k / T with T = G_{n-1}
  double moment = 0.0;
  for (int k = 0; k < n; ++k) moment += dF[k] * c.F[k];
  std::vector<double> dG(n);
  for (int k = 0; k < n; ++k) dG[k] = dF[k] / c.total;
  dG[n - 1] -= moment / c.total;

  // suffix-sum over increments inc_i = dt (p_{i-1} + p_i)/2, i = 1..n-1
  dp.assign(n, 0.0);
  double suffix = 0.0;
  for (int i = n - 1; i >= 1; --i) {
    suffix += dG[i];
    dp[i - 1] += 0.5 * dt * suffix;
    dp[i] += 0.5 * dt * suffix;
  }
}

}  // namespace

double w2_quantile_core(const std::vector<double>& a, const TimeGrid& grid_a,
                        const std::vector<double>& b, const TimeGrid& grid_b, int n_quad,
                        std::vector<double>* grad_a, std::vector<double>* grad_b) {
  Cdf ca = build_cdf(a, grid_a);
  Cdf cb = build_cdf(b, grid_b);
  QuantileSweep qa{&ca}, qb{&cb};

  const double inv_m = 1.0 / n_quad;
  const bool want_grad = grad_a || grad_b;

  std::vector<int> seg_a, seg_b;
  std::vector<double> diff;
  if (want_grad) {
    seg_a.resize(n_quad);
    seg_b.resize(n_quad);
    diff.resize(n_quad);
  }

  double s = 0.0;
  for (int m = 0; m < n_quad; ++m) {
    double u = (m + 0.5) * inv_m;
    double d = qa.eval(u) - qb.eval(u);
    s += d * d;
    if (want_grad) {
      seg_a[m] = qa.k;
      seg_b[m] = qb.k;
      diff[m] = d;
    }
  }
  double w2 = std::sqrt(s * inv_m);

  if (want_grad) {
    std::vector<double> dFa(ca.F.size(), 0.0), dFb(cb.F.size(), 0.0);
    if (w2 > 1e-300) {
      const double c = inv_m / w2;
      QuantileSweep ra{&ca}, rb{&cb};
      for (int m = 0; m < n_quad; ++m) {
        double u = (m + 0.5) * inv_m;
        double dq = diff[m] * c;  // dW2/dQa; dW2/dQb = -dq
        ra.k = seg_a[m];
        rb.k = seg_b[m];
        ra.accumulate(u, dq, dFa);
        rb.accumulate(u, -dq, dFb);
      }
    }
    if (grad_a) backprop_cdf(ca, dFa, *grad_a);
    if (grad_b) backprop_cdf(cb, dFb, *grad_b);
  }
  return w2;
}

}  // namespace pulseforge::transport
