#include "pulseforge/pulsegen/synthesis.hpp"

#include <cmath>

#include "pulseforge/pulsegen/fft.hpp"

namespace pulseforge::pulsegen {

std::vector<double> spectral_phase(const PulseSpec& spec, const FrequencyGrid& grid) {
  std::vector<double> phi(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    double d = grid.offset(j);
    double d2 = d * d;
    phi[j] = 0.5 * spec.phi2 * d2 + (1.0 / 6.0) * spec.phi3 * d2 * d +
             (1.0 / 24.0) * spec.phi4 * d2 * d2;
  }
  return phi;
}

TimeGrid synthesis_time_grid(const FrequencyGrid& grid) {
  return TimeGrid::centered(grid.n_points, grid.time_step());
}

SpectralField synthesize_field(const PulseSpec& spec, const FrequencyGrid& grid) {
  grid.validate();
  TimeGrid tgrid = synthesis_time_grid(grid);
  std::vector<double> intensity = envelope_profile(spec, tgrid);

  std::vector<std::complex<double>> amp(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k) amp[k] = std::sqrt(intensity[k]);

  SpectralField field;
  field.grid = grid;
  field.grid.omega0 = spec.omega0();
  field.values = time_to_freq(amp, tgrid.delta_t);

  std::vector<double> phi = spectral_phase(spec, grid);
  for (int j = 0; j < grid.n_points; ++j) {
    field.values[j] *= std::complex<double>(std::cos(phi[j]), std::sin(phi[j]));
  }
  return field;
}

std::vector<double> to_intensity(const SpectralField& field) {
  auto e_t = freq_to_time(field.values, field.grid.delta_omega);
  std::vector<double> intensity(e_t.size());
  for (size_t k = 0; k < e_t.size(); ++k) intensity[k] = std::norm(e_t[k]);
  return intensity;
}

}  // namespace pulseforge::pulsegen
