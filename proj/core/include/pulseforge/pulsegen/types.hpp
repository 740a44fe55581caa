#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pulseforge/common.hpp"

namespace pulseforge::pulsegen {

enum class Envelope { Secant, Parabolic, Flattop, Triangular, Gaussian };

std::string envelope_name(Envelope e);
Envelope envelope_from_name(const std::string& name);

// Shaping parameters of one pulse. All quantities SI: sigma_t in seconds,
// phi2/3/4 in s^2/s^3/s^4, lambda0 in meters.
struct PulseSpec {
  Envelope envelope = Envelope::Gaussian;
  int order = 1;          // p_T in {1,2,4} or p_G in {1,2,3,4,5,10}; 1 otherwise
  double sigma_t = 10e-12;
  double phi2 = 0.0;
  double phi3 = 0.0;
  double phi4 = 0.0;
  double lambda0 = 1030e-9;
  std::uint64_t seed = 0;

  double omega0() const { return 2.0 * constants::pi * constants::speed_of_light / lambda0; }
  void validate() const;
};

// Angular-frequency grid, offsets centered on omega0: delta_j = (j - n/2)*delta_omega.
struct FrequencyGrid {
  int n_points = 8192;          // power of two
  double delta_omega = 1.041e9; // rad/s
  double omega0 = 0.0;

  double offset(int j) const { return (j - n_points / 2) * delta_omega; }
  // Conjugate time step of the synthesis window: dt = 2*pi / (n * domega).
  double time_step() const {
    return 2.0 * constants::pi / (static_cast<double>(n_points) * delta_omega);
  }
  void validate() const;
};

struct SpectralField {
  FrequencyGrid grid;
  std::vector<std::complex<double>> values;  // E(omega0 + offset)

  double energy() const;  // integral |E|^2 domega (Riemann sum)
};

// Uniform time grid; sample i sits at t_min + i*delta_t.
struct TimeGrid {
  int n_points = 512;
  double delta_t = 0.0;
  double t_min = 0.0;

  double t(int i) const { return t_min + i * delta_t; }
  double t_max() const { return t_min + (n_points - 1) * delta_t; }
  double center() const { return t_min + 0.5 * (n_points - 1) * delta_t; }

  // Grid symmetric about t = 0 with n points and step dt.
  static TimeGrid centered(int n, double dt);
};

// The standardized output grid: 512 samples spanning 40 ps, t = 0 at index 256.
TimeGrid standard_output_grid();
inline constexpr double standard_support = 30e-12;  // seconds

enum class ProfileTag { Input, Propagated };

// Preprocessed nonnegative intensity on a TimeGrid; peak 1, centroid at grid center.
struct IntensityProfile {
  TimeGrid grid;
  std::vector<double> values;
  ProfileTag tag = ProfileTag::Input;
};

// Desk-scale nonlinear propagation stand-in (split-step dispersion + Kerr phase).
struct FiberProxyParams {
  double beta2 = 3e-23;   // s^2/m
  double gamma_nl = 1.0;  // rad/(peak-intensity * m), fields carry peak ~1
  double length = 1.0;    // m
  int n_steps = 64;

  void validate() const;
};

}  // namespace pulseforge::pulsegen
