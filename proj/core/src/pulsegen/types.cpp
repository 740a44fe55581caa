#include "pulseforge/pulsegen/types.hpp"

#include <algorithm>
#include <cmath>

namespace pulseforge::pulsegen {

std::string envelope_name(Envelope e) {
  switch (e) {
    case Envelope::Secant: return "secant";
    case Envelope::Parabolic: return "parabolic";
    case Envelope::Flattop: return "flattop";
    case Envelope::Triangular: return "triangular";
    case Envelope::Gaussian: return "gaussian";
  }
  throw InvalidInputError("unknown envelope enum value");
}

Envelope envelope_from_name(const std::string& name) {
  if (name == "secant") return Envelope::Secant;
  if (name == "parabolic") return Envelope::Parabolic;
  if (name == "flattop") return Envelope::Flattop;
  if (name == "triangular") return Envelope::Triangular;
  if (name == "gaussian") return Envelope::Gaussian;
  throw InvalidInputError("unknown envelope name: " + name);
}

void PulseSpec::validate() const {
  if (!(sigma_t > 0.0)) throw InvalidInputError("PulseSpec: sigma_t must be positive");
  if (!(lambda0 > 0.0)) throw InvalidInputError("PulseSpec: lambda0 must be positive");
  if (envelope == Envelope::Triangular) {
    if (order != 1 && order != 2 && order != 4)
      throw InvalidInputError("PulseSpec: triangular order must be in {1,2,4}");
  } else if (envelope == Envelope::Gaussian) {
    static const int allowed[] = {1, 2, 3, 4, 5, 10};
    if (std::find(std::begin(allowed), std::end(allowed), order) == std::end(allowed))
      throw InvalidInputError("PulseSpec: gaussian order must be in {1,2,3,4,5,10}");
  }
  if (!(std::isfinite(phi2) && std::isfinite(phi3) && std::isfinite(phi4)))
    throw InvalidInputError("PulseSpec: non-finite dispersion coefficient");
}

void FrequencyGrid::validate() const {
  if (n_points < 2 || (n_points & (n_points - 1)) != 0)
    throw InvalidInputError("FrequencyGrid: n_points must be a power of two");
  if (!(delta_omega > 0.0)) throw InvalidInputError("FrequencyGrid: delta_omega must be positive");
}

double SpectralField::energy() const {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.delta_omega;
}

TimeGrid TimeGrid::centered(int n, double dt) {
  TimeGrid g;
  g.n_points = n;
  g.delta_t = dt;
  g.t_min = -dt * (n / 2);
  return g;
}

TimeGrid standard_output_grid() {
  // 512 samples, dt = 78.125 fs, 40 ps span, t = 0 at index 256.
  return TimeGrid::centered(512, 40e-12 / 512.0);
}

void FiberProxyParams::validate() const {
  if (n_steps < 1) throw InvalidInputError("FiberProxyParams: n_steps must be >= 1");
  if (length < 0.0) throw InvalidInputError("FiberProxyParams: length must be >= 0");
}

}  // namespace pulseforge::pulsegen
