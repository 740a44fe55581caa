#include "pulseforge/pulsegen/sampling.hpp"

#include <cmath>

#include "pulseforge/pulsegen/preprocess.hpp"
#include "pulseforge/pulsegen/synthesis.hpp"
#include "pulseforge/util/rng.hpp"

namespace pulseforge::pulsegen {

PulseSpec sample_pulse_spec(std::uint64_t rng_seed, std::uint64_t index, std::uint32_t attempt) {
  std::uint64_t seed = util::derive_seed(rng_seed, index, attempt);
  util::Rng rng(seed);

  PulseSpec spec;
  spec.seed = seed;

  static const Envelope families[5] = {Envelope::Secant, Envelope::Parabolic, Envelope::Flattop,
                                       Envelope::Triangular, Envelope::Gaussian};
  spec.envelope = families[rng.uniform_index(5)];

  static const int tri_orders[3] = {1, 2, 4};
  static const int gauss_orders[6] = {1, 2, 3, 4, 5, 10};
  // Order draws are consumed unconditionally to keep the stream layout fixed.
  int tri = tri_orders[rng.uniform_index(3)];
  int gauss = gauss_orders[rng.uniform_index(6)];
  if (spec.envelope == Envelope::Triangular)
    spec.order = tri;
  else if (spec.envelope == Envelope::Gaussian)
    spec.order = gauss;
  else
    spec.order = 1;

  double sigma_ps = rng.uniform(2.0, 40.0);
  spec.sigma_t = sigma_ps * 1e-12;

  double s2 = sigma_ps * sigma_ps;
  spec.phi2 = rng.normal(0.0, std::sqrt(100.0 / (3.0 * s2))) * 1e-24;
  spec.phi3 = rng.normal(0.0, std::sqrt(100.0 / (3.0 * s2 * sigma_ps))) * 1e-36;
  spec.phi4 = rng.normal(0.0, std::sqrt(400.0 / (3.0 * s2 * s2))) * 1e-48;
  return spec;
}

PulseSpec sample_pulse_spec(std::uint64_t rng_seed, std::uint64_t index) {
  return sample_pulse_spec(rng_seed, index, 0);
}

std::vector<PulseSpec> canonical_specs() {
  std::vector<PulseSpec> specs;
  auto base = [] {
    PulseSpec s;
    s.sigma_t = 10e-12;
    s.phi2 = s.phi3 = s.phi4 = 0.0;
    return s;
  };
  for (Envelope e : {Envelope::Secant, Envelope::Parabolic, Envelope::Flattop}) {
    PulseSpec s = base();
    s.envelope = e;
    specs.push_back(s);
  }
  for (int p : {1, 2, 4}) {
    PulseSpec s = base();
    s.envelope = Envelope::Triangular;
    s.order = p;
    specs.push_back(s);
  }
  for (int p : {1, 2, 3, 4, 5, 10}) {
    PulseSpec s = base();
    s.envelope = Envelope::Gaussian;
    s.order = p;
    specs.push_back(s);
  }
  return specs;
}

IntensityProfile render_profile(const PulseSpec& spec, const FrequencyGrid& grid,
                                const TimeGrid& out_grid) {
  SpectralField field = synthesize_field(spec, grid);
  std::vector<double> intensity = to_intensity(field);
  return preprocess(intensity, synthesis_time_grid(grid), out_grid);
}

}  // namespace pulseforge::pulsegen
