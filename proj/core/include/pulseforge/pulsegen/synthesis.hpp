#pragma once

#include <vector>

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::pulsegen {

// Temporal intensity envelope of the named family, evaluated on the grid.
// Peak 1 at t = 0, symmetric, nonnegative. sigma_t is the intensity FWHM for
// Gaussian/secant and the full base width for parabolic/flattop/triangular.
std::vector<double> envelope_profile(const PulseSpec& spec, const TimeGrid& grid);

// Dispersion polynomial phi(omega) = phi2/2 d^2 + phi3/6 d^3 + phi4/24 d^4,
// d = omega - omega0, on the grid offsets.
std::vector<double> spectral_phase(const PulseSpec& spec, const FrequencyGrid& grid);

// Builds E(omega) = A(omega) exp(i phi(omega)): the time-domain amplitude
// sqrt(envelope) is transformed to the spectral domain, then the dispersion
// phase is applied. |E(omega)| is independent of phi2..phi4.
SpectralField synthesize_field(const PulseSpec& spec, const FrequencyGrid& grid);

// I(t) = |F^{-1} E|^2 on the conjugate synthesis time grid (centered, length
// n_points, dt = grid.time_step()).
std::vector<double> to_intensity(const SpectralField& field);

TimeGrid synthesis_time_grid(const FrequencyGrid& grid);

}  // namespace pulseforge::pulsegen
