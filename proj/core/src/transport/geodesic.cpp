#include "pulseforge/transport/geodesic.hpp"

#include <cmath>
#include <memory>

#include "pulseforge/diffcore/adam.hpp"

namespace pulseforge::transport {

using namespace diffcore;
using models::ModelBinding;
using models::ModelParams;

Tensor GeodesicPath::waypoint(int i) const {
  const int d = waypoints.dim(1);
  Tensor z({1, d});
  std::copy(waypoints.v.begin() + static_cast<std::ptrdiff_t>(i) * d,
            waypoints.v.begin() + static_cast<std::ptrdiff_t>(i + 1) * d, z.v.begin());
  return z;
}

GeodesicPath linear_interpolate(const Tensor& z_a, const Tensor& z_b, int n_waypoints) {
  if (n_waypoints < 2) throw InvalidInputError("linear_interpolate: need at least 2 waypoints");
  if (z_a.size() != z_b.size()) throw ShapeError("linear_interpolate: endpoint length mismatch");
  const int d = static_cast<int>(z_a.size());

  GeodesicPath path;
  path.waypoints = Tensor({n_waypoints, d});
  for (int i = 0; i < n_waypoints; ++i) {
    double t = static_cast<double>(i) / (n_waypoints - 1);
    for (int k = 0; k < d; ++k)
      path.waypoints[static_cast<std::size_t>(i) * d + k] =
          z_a[k] + t * (z_b[k] - z_a[k]);
  }
  // exact endpoints regardless of rounding
  for (int k = 0; k < d; ++k) {
    path.waypoints[k] = z_a[k];
    path.waypoints[static_cast<std::size_t>(n_waypoints - 1) * d + k] = z_b[k];
  }
  return path;
}

EmissionDensity decoded_density(ModelParams& decoder, const Tensor& z) {
  Tensor zz = z;
  if (zz.rank() == 1) zz.shape = {1, static_cast<int>(zz.size())};
  Tensor x = models::decode_batch(decoder, zz);
  std::vector<double> row(x.v.begin(), x.v.begin() + x.dim(1));
  return normalize_to_density(row, pulsegen::standard_output_grid());
}

Var w2_rows(Var clamped, int row_a, int row_b, const TimeGrid& grid, int n_quad) {
  Tape& tape = *clamped.tape;
  const Tensor& xv = clamped.value();
  const int len = xv.dim(1);
  std::vector<double> a(xv.v.begin() + static_cast<std::ptrdiff_t>(row_a) * len,
                        xv.v.begin() + static_cast<std::ptrdiff_t>(row_a + 1) * len);
  std::vector<double> b(xv.v.begin() + static_cast<std::ptrdiff_t>(row_b) * len,
                        xv.v.begin() + static_cast<std::ptrdiff_t>(row_b + 1) * len);
  auto ga = std::make_shared<std::vector<double>>();
  auto gb = std::make_shared<std::vector<double>>();
  double w;
  try {
    w = w2_quantile_core(a, grid, b, grid, n_quad, ga.get(), gb.get());
  } catch (const DegeneratePulseError& e) {
    throw DegeneratePulseError("waypoint " + std::to_string(row_a) + "-" +
                               std::to_string(row_b) + ": " + e.what());
  }
  return tape.node(Tensor::scalar(w), {clamped},
                   [ga, gb, row_a, row_b, len](const Tensor& g,
                                               const std::vector<const Tensor*>&,
                                               const std::vector<Tensor*>& pg) {
                     if (!pg[0]) return;
                     double* da = pg[0]->v.data() + static_cast<std::size_t>(row_a) * len;
                     double* db = pg[0]->v.data() + static_cast<std::size_t>(row_b) * len;
                     for (int k = 0; k < len; ++k) {
                       da[k] += g[0] * (*ga)[k];
                       db[k] += g[0] * (*gb)[k];
                     }
                   });
}

namespace {

// Decoded, clamped waypoint batch plus summed consecutive W2 (in seconds).
Var build_path_length(ModelBinding& binding, Var z_batch, const TimeGrid& grid, int n_quad) {
  Var decoded = binding.decode(z_batch);
  Var clamped = relu(decoded);
  const int n = z_batch.shape()[0];
  Var total;
  for (int i = 0; i + 1 < n; ++i) {
    Var w = w2_rows(clamped, i, i + 1, grid, n_quad);
    total = i == 0 ? w : add(total, w);
  }
  return total;
}

}  // namespace

double path_length(const GeodesicPath& path, ModelParams& decoder, int n_quad) {
  if (path.n_waypoints() < 2) throw InvalidInputError("path_length: need at least 2 waypoints");
  Tape tape;
  ModelBinding binding(tape, decoder, false);
  Var z = tape.input(path.waypoints);
  return build_path_length(binding, z, pulsegen::standard_output_grid(), n_quad)
      .value()
      .scalar_value();
}

double optimality_ratio(const GeodesicPath& path, ModelParams& decoder, int n_quad) {
  const int n = path.n_waypoints();
  EmissionDensity da = decoded_density(decoder, path.waypoint(0));
  EmissionDensity db = decoded_density(decoder, path.waypoint(n - 1));
  double endpoint_w2 = w2_1d(da, db, n_quad);
  if (!(endpoint_w2 > 1e-30))
    throw InvalidInputError("optimality_ratio: endpoint densities coincide");
  double len = path.length >= 0.0 ? path.length : path_length(path, decoder, n_quad);
  return len / endpoint_w2;
}

GeodesicPath optimize_geodesic(const Tensor& z_a, const Tensor& z_b, ModelParams& decoder,
                               int n_waypoints, int steps, double lr, int n_quad) {
  if (n_waypoints < 3) throw InvalidInputError("optimize_geodesic: need at least 3 waypoints");
  const TimeGrid grid = pulsegen::standard_output_grid();
  const int d = static_cast<int>(z_a.size());
  const int n_interior = n_waypoints - 2;

  GeodesicPath path = linear_interpolate(z_a, z_b, n_waypoints);
  std::vector<Tensor> interior(n_interior);
  for (int i = 0; i < n_interior; ++i) {
    interior[i] = Tensor({d});
    std::copy(path.waypoints.v.begin() + static_cast<std::ptrdiff_t>(i + 1) * d,
              path.waypoints.v.begin() + static_cast<std::ptrdiff_t>(i + 2) * d,
              interior[i].v.begin());
  }

  AdamState adam(lr);
  adam.init(interior);
  std::vector<Tensor*> param_ptrs;
  for (auto& t : interior) param_ptrs.push_back(&t);

  Tensor row_a({d}, std::vector<double>(z_a.v)), row_b({d}, std::vector<double>(z_b.v));
  double best_len = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best = interior;

  for (int step = 0; step <= steps; ++step) {
    Tape tape;
    ModelBinding binding(tape, decoder, false);
    std::vector<Var> rows;
    rows.push_back(tape.input(row_a));
    std::vector<Var> interior_vars;
    for (auto& t : interior) {
      interior_vars.push_back(tape.param(t));
      rows.push_back(interior_vars.back());
    }
    rows.push_back(tape.input(row_b));
    Var z_batch = concat_rows(rows);

    // optimize in picoseconds so Adam's epsilon is small against the scale
    Var len_s = build_path_length(binding, z_batch, grid, n_quad);
    Var loss = scale_shift(len_s, 1e12, 0.0);
    double len = len_s.value().scalar_value();
    if (!std::isfinite(len))
      throw DivergenceError("optimize_geodesic: non-finite path length at step " +
                            std::to_string(step));
    if (len < best_len) {
      best_len = len;
      best = interior;
    }
    if (step == steps) break;

    tape.backward(loss);
    std::vector<Tensor> grads;
    std::vector<const Tensor*> grad_ptrs;
    grads.reserve(interior_vars.size());
    for (Var v : interior_vars) grads.push_back(tape.grad(v));
    for (auto& g : grads) grad_ptrs.push_back(&g);
    adam_step(adam, param_ptrs, grad_ptrs);
  }

  for (int i = 0; i < n_interior; ++i)
    std::copy(best[i].v.begin(), best[i].v.end(),
              path.waypoints.v.begin() + static_cast<std::ptrdiff_t>(i + 1) * d);
  path.length = best_len;
  path.ratio = optimality_ratio(path, decoder, n_quad);
  return path;
}

}  // namespace pulseforge::transport
