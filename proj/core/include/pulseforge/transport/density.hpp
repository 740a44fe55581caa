#pragma once

#include <cstdint>
#include <vector>

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::transport {

using pulsegen::IntensityProfile;
using pulsegen::TimeGrid;

// A pulse intensity read as a probability density over emission time.
// pdf integrates to 1 (trapezoid rule); cdf is the cumulative trapezoid,
// renormalized so the final value is exactly 1.
struct EmissionDensity {
  TimeGrid grid;
  std::vector<double> pdf;
  std::vector<double> cdf;
};

// Clamps negatives to zero (decoder outputs can dip below 0) and normalizes.
// Throws DegeneratePulseError if nothing positive remains.
EmissionDensity normalize_to_density(const std::vector<double>& values, const TimeGrid& grid);
EmissionDensity normalize_to_density(const IntensityProfile& profile);

// Generalized inverse F^{-1}(u) = inf{t : F(t) >= u}, piecewise-linear on the
// grid. u = 0 maps to the first time with positive mass, u = 1 to the last.
double quantile(const EmissionDensity& density, double u);

// 1D 2-Wasserstein distance via the quantile quadrature
//   W2^2 = integral_0^1 (F_a^{-1}(u) - F_b^{-1}(u))^2 du
// with n_quad midpoint nodes.
double w2_1d(const EmissionDensity& a, const EmissionDensity& b, int n_quad = 1024);

// Inverse transform sampling: t_i = F^{-1}(u_i), u_i from a seeded uniform
// stream. Deterministic per seed.
std::vector<double> sample_emission_times(const EmissionDensity& density, std::size_t n,
                                          std::uint64_t seed);

// Shared quantile-quadrature core. Values need not be normalized (quantiles
// are scale-invariant); negatives must already be clamped. When grad_a/grad_b
// are non-null they receive d(W2)/d(a_k), d(W2)/d(b_k), differentiating
// through the internal normalization, the cumulative trapezoid and the
// piecewise-linear quantile interpolation (left subgradients at kinks).
double w2_quantile_core(const std::vector<double>& a, const TimeGrid& grid_a,
                        const std::vector<double>& b, const TimeGrid& grid_b, int n_quad,
                        std::vector<double>* grad_a = nullptr,
                        std::vector<double>* grad_b = nullptr);

}  // namespace pulseforge::transport
