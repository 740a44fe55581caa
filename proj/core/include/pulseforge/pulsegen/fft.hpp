#pragma once

#include <complex>
#include <vector>

namespace pulseforge::pulsegen {

// Centered-grid Fourier transforms between a time grid t_k = (k - n/2) dt and
// an angular-frequency grid w_j = (j - n/2) dw with dt = 2 pi / (n dw).
// Conventions follow the continuous pair
//   E(w) = integral E(t) exp(-i w t) dt        (time_to_freq, scaled by dt)
//   E(t) = 1/(2 pi) integral E(w) exp(i w t) dw (freq_to_time, scaled by dw/2pi)
// so that roundtrips are exact and Parseval reads
//   sum |E(t)|^2 dt = (1/2pi) sum |E(w)|^2 dw.
// Thread-safe; FFTW plans are cached per thread.
std::vector<std::complex<double>> time_to_freq(const std::vector<std::complex<double>>& in,
                                               double dt);
std::vector<std::complex<double>> freq_to_time(const std::vector<std::complex<double>>& in,
                                               double delta_omega);

}  // namespace pulseforge::pulsegen
