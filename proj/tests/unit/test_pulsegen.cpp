#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pulseforge/pulsegen/fft.hpp"
#include "pulseforge/pulsegen/fiber.hpp"
#include "pulseforge/pulsegen/preprocess.hpp"
#include "pulseforge/pulsegen/sampling.hpp"
#include "pulseforge/pulsegen/synthesis.hpp"
#include "pulseforge/transport/density.hpp"

using namespace pulseforge;
using namespace pulseforge::pulsegen;

namespace {

PulseSpec gaussian_spec(double sigma_ps, int order = 1) {
  PulseSpec s;
  s.envelope = Envelope::Gaussian;
  s.order = order;
  s.sigma_t = sigma_ps * 1e-12;
  return s;
}

double centroid_offset_samples(const IntensityProfile& p) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < p.grid.n_points; ++i) {
    num += p.grid.t(i) * p.values[i];
    den += p.values[i];
  }
  return (num / den - p.grid.center()) / p.grid.delta_t;
}

}  // namespace

TEST_CASE("sample_pulse_spec is deterministic in (seed, index)") {
  PulseSpec a = sample_pulse_spec(7, 0);
  PulseSpec b = sample_pulse_spec(7, 0);
  CHECK(a.envelope == b.envelope);
  CHECK(a.order == b.order);
  CHECK(a.sigma_t == b.sigma_t);
  CHECK(a.phi2 == b.phi2);
  CHECK(a.phi3 == b.phi3);
  CHECK(a.phi4 == b.phi4);
  CHECK(a.seed == b.seed);
  PulseSpec c = sample_pulse_spec(7, 1);
  CHECK(a.seed != c.seed);
}

TEST_CASE("sampled parameters follow the documented distributions") {
  const int n = 100000;
  int family_counts[5] = {0, 0, 0, 0, 0};
  // dispersion draws rescaled to sigma-free variables: w2 = phi2_ps2 * sigma,
  // w3 = phi3_ps3 * sigma^1.5, w4 = phi4_ps4 * sigma^2 are N(0, 100/3),
  // N(0, 100/3), N(0, 400/3)
  double v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double sig_min = 1e9, sig_max = -1e9;
  for (int i = 0; i < n; ++i) {
    PulseSpec s = sample_pulse_spec(42, i);
    family_counts[static_cast<int>(s.envelope)]++;
    double sig = s.sigma_t * 1e12;
    sig_min = std::min(sig_min, sig);
    sig_max = std::max(sig_max, sig);
    double w2 = s.phi2 * 1e24 * sig;
    double w3 = s.phi3 * 1e36 * std::pow(sig, 1.5);
    double w4 = s.phi4 * 1e48 * sig * sig;
    v2 += w2 * w2;
    v3 += w3 * w3;
    v4 += w4 * w4;
    if (s.envelope == Envelope::Triangular)
      CHECK((s.order == 1 || s.order == 2 || s.order == 4));
    if (s.envelope == Envelope::Gaussian)
      CHECK((s.order >= 1 && s.order <= 10));
  }
  // binomial three-sigma band around 1/5
  double se = std::sqrt(0.2 * 0.8 / n);
  for (int f = 0; f < 5; ++f)
    CHECK(std::abs(family_counts[f] / static_cast<double>(n) - 0.2) < 3.0 * se);

  CHECK(sig_min >= 2.0);
  CHECK(sig_max <= 40.0);
  // sample variance of a normal: se(v) ~ var * sqrt(2/n)
  double tol = std::sqrt(2.0 / n) * 4.0;
  CHECK(v2 / n == doctest::Approx(100.0 / 3.0).epsilon(tol));
  CHECK(v3 / n == doctest::Approx(100.0 / 3.0).epsilon(tol));
  CHECK(v4 / n == doctest::Approx(400.0 / 3.0).epsilon(tol));
}

TEST_CASE("envelope profiles hit their width landmarks") {
  TimeGrid g = TimeGrid::centered(64, 0.25e-12);  // +-5 ps and +-2.5 ps on-grid

  SUBCASE("gaussian order 1: value 1/2 at +-sigma/2") {
    auto v = envelope_profile(gaussian_spec(10.0), g);
    CHECK(v[32] == doctest::Approx(1.0));                      // t = 0
    CHECK(v[32 + 20] == doctest::Approx(0.5).epsilon(1e-12));  // t = +5 ps
    CHECK(v[32 - 20] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("triangular order 1: linear ramp, 1/2 at +-sigma/4, zero at +-sigma/2") {
    PulseSpec s;
    s.envelope = Envelope::Triangular;
    s.order = 1;
    s.sigma_t = 10e-12;
    auto v = envelope_profile(s, g);
    CHECK(v[32 + 10] == doctest::Approx(0.5));  // t = 2.5 ps
    CHECK(v[32 + 20] == doctest::Approx(0.0));  // t = 5 ps
  }
  SUBCASE("secant: value 1/2 at +-sigma/2") {
    PulseSpec s;
    s.envelope = Envelope::Secant;
    s.sigma_t = 10e-12;
    auto v = envelope_profile(s, g);
    CHECK(v[32 + 20] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("all families: nonnegative, peak 1 at center, symmetric") {
    for (const PulseSpec& s : canonical_specs()) {
      auto v = envelope_profile(s, g);
      CHECK(v[32] == doctest::Approx(1.0));
      for (int i = 1; i < 32; ++i) {
        CHECK(v[32 + i] == doctest::Approx(v[32 - i]));
        CHECK(v[32 + i] >= 0.0);
      }
    }
  }
  SUBCASE("invalid orders rejected") {
    PulseSpec s;
    s.envelope = Envelope::Triangular;
    s.order = 3;
    CHECK_THROWS_AS(envelope_profile(s, g), InvalidInputError);
    s.envelope = Envelope::Gaussian;
    s.order = 7;
    CHECK_THROWS_AS(envelope_profile(s, g), InvalidInputError);
  }
}

TEST_CASE("spectral phase polynomial") {
  FrequencyGrid g;
  g.n_points = 8;
  g.delta_omega = 1.0;
  PulseSpec s = gaussian_spec(10.0);

  SUBCASE("zero coefficients give zero phase") {
    auto phi = spectral_phase(s, g);
    for (double p : phi) CHECK(p == 0.0);
  }
  SUBCASE("phi2 term: 1/2 * 2 * 3^2 = 9") {
    s.phi2 = 2.0;
    auto phi = spectral_phase(s, g);
    CHECK(phi[4 + 3] == doctest::Approx(9.0));  // offset = +3
  }
  SUBCASE("phi4 term: 24/24 * 1^4 = 1") {
    s.phi4 = 24.0;
    auto phi = spectral_phase(s, g);
    CHECK(phi[4 + 1] == doctest::Approx(1.0));
  }
}

TEST_CASE("synthesize_field") {
  FrequencyGrid grid;
  PulseSpec s = gaussian_spec(10.0);

  SUBCASE("zero dispersion: time-domain field real and even") {
    auto f = synthesize_field(s, grid);
    auto e_t = freq_to_time(f.values, grid.delta_omega);
    double peak = 0.0;
    for (auto& v : e_t) peak = std::max(peak, std::abs(v));
    for (int m = 1; m < 2048; m += 7) {
      int c = grid.n_points / 2;
      CHECK(std::abs(e_t[c + m].imag()) < 1e-9 * peak);
      CHECK(std::abs(e_t[c + m] - e_t[c - m]) < 1e-9 * peak);
    }
  }
  SUBCASE("spectral magnitude unchanged by dispersion") {
    auto f0 = synthesize_field(s, grid);
    PulseSpec sc = s;
    sc.phi2 = 5e-24;
    sc.phi3 = 2e-36;
    sc.phi4 = 1e-48;
    auto fc = synthesize_field(sc, grid);
    CHECK(fc.energy() == doctest::Approx(f0.energy()).epsilon(1e-9));
    for (int j = 2000; j < 6192; j += 97)
      CHECK(std::abs(fc.values[j]) == doctest::Approx(std::abs(f0.values[j])).epsilon(1e-9));
  }
  SUBCASE("chirped gaussian FWHM broadening matches the analytic factor") {
    TimeGrid tg = synthesis_time_grid(grid);
    auto I0 = to_intensity(synthesize_field(s, grid));
    double tau0 = oracles::fwhm(I0, tg);
    CHECK(tau0 == doctest::Approx(10e-12).epsilon(1e-3));
    for (double phi2_ps2 : {5.0, 20.0, 60.0}) {
      PulseSpec sc = s;
      sc.phi2 = phi2_ps2 * 1e-24;
      auto Ic = to_intensity(synthesize_field(sc, grid));
      double pred =
          tau0 * std::sqrt(1.0 + std::pow(4.0 * std::log(2.0) * sc.phi2 / (tau0 * tau0), 2));
      CHECK(oracles::fwhm(Ic, tg) == doctest::Approx(pred).epsilon(0.01));
    }
  }
}

TEST_CASE("to_intensity") {
  FrequencyGrid grid;

  SUBCASE("zero field gives zero intensity") {
    SpectralField f;
    f.grid = grid;
    f.values.assign(grid.n_points, {0.0, 0.0});
    auto I = to_intensity(f);
    for (double v : I) CHECK(v == 0.0);
  }
  SUBCASE("zero-phase synthesis reproduces the envelope (transform-limited)") {
    PulseSpec s = gaussian_spec(12.0, 2);
    auto I = to_intensity(synthesize_field(s, grid));
    auto env = envelope_profile(s, synthesis_time_grid(grid));
    for (int k = 0; k < grid.n_points; k += 53)
      CHECK(I[k] == doctest::Approx(env[k]).epsilon(1e-9));
  }
  SUBCASE("Parseval: temporal and spectral energies agree") {
    for (const PulseSpec& s : canonical_specs()) {
      auto f = synthesize_field(s, grid);
      auto I = to_intensity(f);
      double et = std::accumulate(I.begin(), I.end(), 0.0) * synthesis_time_grid(grid).delta_t;
      double ew = f.energy() / (2.0 * constants::pi);
      CHECK(et == doctest::Approx(ew).epsilon(1e-6));
    }
  }
}

TEST_CASE("split-step fiber proxy") {
  FrequencyGrid grid;
  PulseSpec s = gaussian_spec(8.0);
  auto f = synthesize_field(s, grid);

  SUBCASE("no dispersion, no nonlinearity: identity") {
    FiberProxyParams p;
    p.beta2 = 0.0;
    p.gamma_nl = 0.0;
    auto out = propagate_splitstep(f, p);
    for (int j = 0; j < grid.n_points; j += 331)
      CHECK(std::abs(out.values[j] - f.values[j]) < 1e-12);
  }
  SUBCASE("pure dispersion follows the analytic GVD broadening") {
    FiberProxyParams p;
    p.gamma_nl = 0.0;
    p.beta2 = 3e-23;
    auto out = propagate_splitstep(f, p);
    TimeGrid tg = synthesis_time_grid(grid);
    double tau0 = oracles::fwhm(to_intensity(f), tg);
    double pred = tau0 * std::sqrt(1.0 + std::pow(4.0 * std::log(2.0) * p.beta2 * p.length /
                                                  (tau0 * tau0), 2));
    CHECK(oracles::fwhm(to_intensity(out), tg) == doctest::Approx(pred).epsilon(0.01));
  }
  SUBCASE("energy conserved with nonlinearity on") {
    FiberProxyParams p;  // defaults: dispersion + Kerr
    auto out = propagate_splitstep(f, p);
    CHECK(out.energy() == doctest::Approx(f.energy()).epsilon(1e-6));
  }
  SUBCASE("non-finite input raises DivergenceError") {
    SpectralField bad = f;
    bad.values[100] = {std::numeric_limits<double>::infinity(), 0.0};
    FiberProxyParams p;
    CHECK_THROWS_AS(propagate_splitstep(bad, p), DivergenceError);
  }
  SUBCASE("parameter validation") {
    FiberProxyParams p;
    p.n_steps = 0;
    CHECK_THROWS_AS(propagate_splitstep(f, p), InvalidInputError);
  }
}

TEST_CASE("preprocess") {
  FrequencyGrid grid;
  TimeGrid tg = synthesis_time_grid(grid);
  TimeGrid out = standard_output_grid();

  SUBCASE("output invariants: peak 1, centroid centered, values in [0,1]") {
    for (const PulseSpec& s : canonical_specs()) {
      auto prof = render_profile(s);
      double mx = *std::max_element(prof.values.begin(), prof.values.end());
      CHECK(mx == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(centroid_offset_samples(prof)) < 0.5);
      for (double v : prof.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
      }
    }
  }
  SUBCASE("support standardization: flattop fills the central 30 ps") {
    PulseSpec s;
    s.envelope = Envelope::Flattop;
    s.sigma_t = 14e-12;
    auto prof = render_profile(s);
    int above = 0;
    for (double v : prof.values)
      if (v >= 1e-3) ++above;
    CHECK(above >= 381);
    CHECK(above <= 387);  // 30 ps = 384 samples
    CHECK(static_cast<int>(prof.values.size()) == 512);
  }
  SUBCASE("shape-only: different sigma_t collapse to one standardized profile") {
    auto p5 = render_profile(gaussian_spec(5.0));
    auto p20 = render_profile(gaussian_spec(20.0));
    for (int i = 0; i < 512; ++i)
      CHECK(std::abs(p5.values[i] - p20.values[i]) < 1e-3);
  }
  SUBCASE("idempotence") {
    for (const PulseSpec& s : {gaussian_spec(7.0), gaussian_spec(10.0, 10)}) {
      auto p1 = render_profile(s);
      auto p2 = preprocess(p1.values, p1.grid, p1.grid);
      for (int i = 0; i < 512; ++i) CHECK(std::abs(p2.values[i] - p1.values[i]) < 1e-5);
    }
  }
  SUBCASE("degenerate inputs") {
    std::vector<double> zeros(tg.n_points, 0.0);
    CHECK_THROWS_AS(preprocess(zeros, tg, out), DegeneratePulseError);
    std::vector<double> spike(tg.n_points, 0.0);
    spike[4096] = 1.0;
    spike[4097] = 0.5;
    CHECK_THROWS_AS(preprocess(spike, tg, out), DegeneratePulseError);
  }
}

TEST_CASE("pulse_energy") {
  SUBCASE("flattop is maximal and close to the 30 ps rectangle") {
    double e_flat = 0.0;
    std::vector<double> energies;
    for (const PulseSpec& s : canonical_specs()) {
      auto prof = render_profile(s);
      double e = pulse_energy(prof);
      energies.push_back(e);
      if (s.envelope == Envelope::Flattop) e_flat = e;
    }
    for (double e : energies) CHECK(e <= e_flat + 1e-15);
    CHECK(e_flat == doctest::Approx(30e-12).epsilon(0.05));
  }
  SUBCASE("triangle has about half the flattop energy") {
    PulseSpec tri;
    tri.envelope = Envelope::Triangular;
    tri.order = 1;
    tri.sigma_t = 10e-12;
    PulseSpec flat;
    flat.envelope = Envelope::Flattop;
    flat.sigma_t = 10e-12;
    double ratio = pulse_energy(render_profile(tri)) / pulse_energy(render_profile(flat));
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.06));
  }
  SUBCASE("energy is invariant under centroid shift") {
    TimeGrid g = standard_output_grid();
    IntensityProfile a;
    a.grid = g;
    a.values.assign(512, 0.0);
    for (int i = 100; i < 200; ++i) a.values[i] = 1.0;
    IntensityProfile b = a;
    std::rotate(b.values.begin(), b.values.begin() + 150, b.values.end());
    CHECK(pulse_energy(a) == doctest::Approx(pulse_energy(b)));
  }
}

TEST_CASE("super-gaussian limit: W2 to flattop non-increasing in order") {
  for (double sigma_ps : {8.0, 14.0}) {
    PulseSpec flat;
    flat.envelope = Envelope::Flattop;
    flat.sigma_t = sigma_ps * 1e-12;
    auto dflat = transport::normalize_to_density(render_profile(flat));
    double prev = std::numeric_limits<double>::infinity();
    for (int p : {1, 2, 3, 4, 5, 10}) {
      auto d = transport::normalize_to_density(render_profile(gaussian_spec(sigma_ps, p)));
      double w = transport::w2_1d(d, dflat);
      CHECK(w <= prev + 1e-15);
      prev = w;
    }
  }
}
