#pragma once

#include <vector>

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::pulsegen {

// Fraction of the peak that counts as pulse support (robust to FFT ringing).
inline constexpr double support_threshold = 1e-3;

// Standardizes a raw intensity trace:
//   1. peak-normalize,
//   2. align the temporal centroid with the output grid center,
//   3. rescale the support (first-to-last crossing of support_threshold*peak,
//      sub-sample resolution) to exactly 30 ps,
//   4. resample onto out_grid with local cubic interpolation, clamped >= 0.
// Throws DegeneratePulseError for all-zero input or support under 3 samples.
IntensityProfile preprocess(const std::vector<double>& raw, const TimeGrid& in_grid,
                            const TimeGrid& out_grid, ProfileTag tag = ProfileTag::Input);

// integral of the profile over time (Riemann sum, seconds for unit peak).
double pulse_energy(const IntensityProfile& profile);

// Catmull-Rom interpolation of uniformly gridded samples; zero outside.
double interp_cubic(const std::vector<double>& values, const TimeGrid& grid, double t);

}  // namespace pulseforge::pulsegen
