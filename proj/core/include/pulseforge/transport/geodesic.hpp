#pragma once

#include "pulseforge/models/network.hpp"
#include "pulseforge/transport/density.hpp"

namespace pulseforge::transport {

using diffcore::Tensor;

// Ordered latent waypoints z_1..z_N with endpoints held fixed.
struct GeodesicPath {
  Tensor waypoints;  // [N, latent_dim]
  double length = -1.0;  // discrete path length, filled by path_length/optimize
  double ratio = -1.0;   // length / W2(decoded endpoints)

  int n_waypoints() const { return waypoints.dim(0); }
  Tensor waypoint(int i) const;
};

// z_i = z_a + (i-1)/(N-1) (z_b - z_a); endpoints exact.
GeodesicPath linear_interpolate(const Tensor& z_a, const Tensor& z_b, int n_waypoints);

// Decoded waypoint as an emission density on the standard output grid
// (decoder output clamped at 0 before normalization).
EmissionDensity decoded_density(models::ModelParams& decoder, const Tensor& z);

// L(path) = sum of consecutive quantile-quadrature W2 distances between the
// decoded waypoint densities. Throws DegeneratePulseError naming the
// waypoint whose decode carries no positive mass.
double path_length(const GeodesicPath& path, models::ModelParams& decoder, int n_quad = 1024);

// rho = L / W2(decoded endpoints) >= 1 up to quadrature tolerance; throws
// InvalidInputError when the endpoint densities coincide.
double optimality_ratio(const GeodesicPath& path, models::ModelParams& decoder,
                        int n_quad = 1024);

// Adam descent on the interior waypoints; gradients flow through the decoder,
// the clamping, the density normalization and the quantile-integral W2.
// Returns the best-seen path, so the result never exceeds the initial length.
GeodesicPath optimize_geodesic(const Tensor& z_a, const Tensor& z_b,
                               models::ModelParams& decoder, int n_waypoints, int steps = 300,
                               double lr = 1e-2, int n_quad = 1024);

// Differentiable building block: W2 between two rows of a decoded
// (already clamped nonnegative) batch [N, len] on the given grid.
diffcore::Var w2_rows(diffcore::Var clamped, int row_a, int row_b, const TimeGrid& grid,
                      int n_quad);

}  // namespace pulseforge::transport
