#include "pulseforge/transport/density.hpp"

#include <algorithm>
#include <cmath>

#include "pulseforge/common.hpp"
#include "pulseforge/util/rng.hpp"

namespace pulseforge::transport {

EmissionDensity normalize_to_density(const std::vector<double>& values, const TimeGrid& grid) {
  if (static_cast<int>(values.size()) != grid.n_points)
    throw ShapeError("normalize_to_density: length does not match grid");
  const int n = grid.n_points;

  EmissionDensity d;
  d.grid = grid;
  d.pdf.resize(n);
  for (int i = 0; i < n; ++i) d.pdf[i] = std::max(0.0, values[i]);

  double total = 0.0;
  for (int i = 1; i < n; ++i) total += 0.5 * (d.pdf[i - 1] + d.pdf[i]) * grid.delta_t;
  if (!(total > 0.0))
    throw DegeneratePulseError("normalize_to_density: no positive mass");

  for (auto& v : d.pdf) v /= total;

  d.cdf.resize(n);
  d.cdf[0] = 0.0;
  for (int i = 1; i < n; ++i)
    d.cdf[i] = d.cdf[i - 1] + 0.5 * (d.pdf[i - 1] + d.pdf[i]) * grid.delta_t;
  double last = d.cdf[n - 1];
  for (auto& v : d.cdf) v /= last;  // exact 1 at the end
  return d;
}

EmissionDensity normalize_to_density(const IntensityProfile& profile) {
  return normalize_to_density(profile.values, profile.grid);
}

double quantile(const EmissionDensity& density, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidInputError("quantile: u must lie in [0, 1]");
  const auto& F = density.cdf;
  const auto& g = density.grid;
  const int n = g.n_points;

  if (u == 0.0) {
    int k = 0;
    while (k + 1 < n && F[k + 1] <= 0.0) ++k;
    return g.t(k);
  }
  // first k with F[k] >= u; F[k-1] < u so the segment has positive width
  auto it = std::lower_bound(F.begin(), F.end(), u);
  int k = static_cast<int>(it - F.begin());
  if (k == 0) return g.t(0);
  double w = F[k] - F[k - 1];
  return g.t(k - 1) + (u - F[k - 1]) / w * g.delta_t;
}

std::vector<double> sample_emission_times(const EmissionDensity& density, std::size_t n,
                                          std::uint64_t seed) {
  util::Rng rng(seed);
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = quantile(density, rng.uniform());
  return times;
}

double w2_1d(const EmissionDensity& a, const EmissionDensity& b, int n_quad) {
  if (n_quad < 64) throw InvalidInputError("w2_1d: n_quad must be >= 64");
  return w2_quantile_core(a.pdf, a.grid, b.pdf, b.grid, n_quad);
}

}  // namespace pulseforge::transport
