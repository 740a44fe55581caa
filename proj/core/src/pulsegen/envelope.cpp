#include <cmath>

#include "pulseforge/pulsegen/synthesis.hpp"

namespace pulseforge::pulsegen {

namespace {

const double ln2 = std::log(2.0);
const double sech_scale = 2.0 * std::acosh(std::sqrt(2.0));  // sech^2 hits 1/2 at sigma/2

double gaussian_order(double t, double sigma, int p) {
  double x = 2.0 * t / sigma;
  return std::exp(-ln2 * std::pow(x * x, p));
}

double secant(double t, double sigma) {
  double c = std::cosh(sech_scale * t / sigma);
  return 1.0 / (c * c);
}

double parabolic(double t, double sigma) {
  double x = 2.0 * t / sigma;
  return std::max(0.0, 1.0 - x * x);
}

// Indicator of |t| <= sigma/2 with raised-cosine edges of width 0.05*sigma
// inside the base, so the full base width stays sigma.
double flattop(double t, double sigma) {
  double a = std::abs(t);
  double half = 0.5 * sigma;
  double edge = 0.05 * sigma;
  if (a >= half) return 0.0;
  if (a <= half - edge) return 1.0;
  double x = (a - (half - edge)) / edge;  // 0 at flat core, 1 at base
  return 0.5 * (1.0 + std::cos(M_PI * x));
}

double triangular(double t, double sigma, int p) {
  double x = std::abs(2.0 * t / sigma);
  if (x >= 1.0) return 0.0;
  return std::pow(1.0 - x, p);
}

}  // namespace

std::vector<double> envelope_profile(const PulseSpec& spec, const TimeGrid& grid) {
  spec.validate();
  std::vector<double> out(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    double t = grid.t(i);
    switch (spec.envelope) {
      case Envelope::Gaussian: out[i] = gaussian_order(t, spec.sigma_t, spec.order); break;
      case Envelope::Secant: out[i] = secant(t, spec.sigma_t); break;
      case Envelope::Parabolic: out[i] = parabolic(t, spec.sigma_t); break;
      case Envelope::Flattop: out[i] = flattop(t, spec.sigma_t); break;
      case Envelope::Triangular: out[i] = triangular(t, spec.sigma_t, spec.order); break;
      default: throw InvalidInputError("envelope_profile: unknown envelope");
    }
  }
  return out;
}

}  // namespace pulseforge::pulsegen
