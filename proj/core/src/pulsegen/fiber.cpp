#include "pulseforge/pulsegen/fiber.hpp"

#include <cmath>

#include "pulseforge/pulsegen/fft.hpp"

namespace pulseforge::pulsegen {

namespace {

void check_finite(const std::vector<std::complex<double>>& v, int step) {
  for (const auto& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw DivergenceError("propagate_splitstep: non-finite field at step " +
                            std::to_string(step));
  }
}

}  // namespace

SpectralField propagate_splitstep(const SpectralField& field, const FiberProxyParams& params) {
  params.validate();
  const FrequencyGrid& grid = field.grid;
  const int n = grid.n_points;
  const double dz = params.length / params.n_steps;
  const double dt = grid.time_step();

  // Half-step dispersion phasors exp(i beta2 d^2 dz / 4) (applied twice per step).
  std::vector<std::complex<double>> half_disp(n);
  for (int j = 0; j < n; ++j) {
    double d = grid.offset(j);
    double phase = 0.25 * params.beta2 * d * d * dz;
    half_disp[j] = std::complex<double>(std::cos(phase), std::sin(phase));
  }

  std::vector<std::complex<double>> e_w = field.values;
  for (int step = 0; step < params.n_steps; ++step) {
    for (int j = 0; j < n; ++j) e_w[j] *= half_disp[j];
    auto e_t = freq_to_time(e_w, grid.delta_omega);
    // Synthesized fields enter with peak |E(t)|^2 ~ 1, so gamma*length is
    // the peak nonlinear phase in radians.
    for (int k = 0; k < n; ++k) {
      double p = std::norm(e_t[k]);
      double phase = params.gamma_nl * p * dz;
      e_t[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    e_w = time_to_freq(e_t, dt);
    for (int j = 0; j < n; ++j) e_w[j] *= half_disp[j];
    check_finite(e_w, step);
  }

  SpectralField out;
  out.grid = grid;
  out.values = std::move(e_w);
  return out;
}

}  // namespace pulseforge::pulsegen
