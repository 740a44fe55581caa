#pragma once

#include <cstdint>
#include <vector>

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::pulsegen {

// Draws one random shaping parameter set. Pure function of (rng_seed, index):
// envelope uniform over the five families, orders uniform over their sets,
// sigma_t ~ U([2, 40]) ps, and dispersion coefficients (in picosecond units,
// sigma in ps)
//   phi2 ~ N(0, 100/(3 sigma^2)) ps^2
//   phi3 ~ N(0, 100/(3 sigma^3)) ps^3
//   phi4 ~ N(0, 400/(3 sigma^4)) ps^4
// converted to SI for storage.
PulseSpec sample_pulse_spec(std::uint64_t rng_seed, std::uint64_t index);

// Variant used when a draw produced a degenerate pulse: same index, distinct
// sub-stream per attempt.
PulseSpec sample_pulse_spec(std::uint64_t rng_seed, std::uint64_t index, std::uint32_t attempt);

// The thirteen dispersion-free reference shapes (one per family/order):
// secant, parabolic, flattop, triangular p in {1,2,4}, gaussian p in
// {1,2,3,4,5,10}, all at sigma_t = 10 ps. After support standardization the
// preprocessed shape of each family does not depend on sigma_t.
std::vector<PulseSpec> canonical_specs();

// Full synthesis pipeline for one spec: spectral field -> temporal intensity
// -> standardized 512-sample profile.
IntensityProfile render_profile(const PulseSpec& spec,
                                const FrequencyGrid& grid = FrequencyGrid{},
                                const TimeGrid& out_grid = standard_output_grid());

}  // namespace pulseforge::pulsegen
