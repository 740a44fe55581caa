#pragma once

#include "pulseforge/pulsegen/types.hpp"

namespace pulseforge::pulsegen {

// Symmetric (Strang) split-step evolution: half a dispersion step
// exp(i beta2 d^2 dz / 2) in the spectral domain, a full Kerr step
// exp(i gamma |E|^2 dz) in time, half a dispersion step. All factors are
// unimodular, so field energy is conserved. Throws DivergenceError on
// non-finite intermediates.
SpectralField propagate_splitstep(const SpectralField& field, const FiberProxyParams& params);

}  // namespace pulseforge::pulsegen
