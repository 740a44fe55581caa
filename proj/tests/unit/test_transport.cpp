#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pulseforge/pulsegen/sampling.hpp"
#include "pulseforge/transport/density.hpp"

using namespace pulseforge;
using namespace pulseforge::transport;
using pulseforge::pulsegen::TimeGrid;

namespace {

EmissionDensity gaussian_density(double mu, double sigma, const TimeGrid& g) {
  std::vector<double> v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    double d = (g.t(i) - mu) / sigma;
    v[i] = std::exp(-0.5 * d * d);
  }
  return normalize_to_density(v, g);
}

TimeGrid unit_grid(double span, int n = 512) {
  TimeGrid g;
  g.n_points = n;
  g.delta_t = span / (n - 1);
  g.t_min = 0.0;
  return g;
}

}  // namespace

TEST_CASE("normalize_to_density") {
  TimeGrid g = unit_grid(40.0);

  SUBCASE("constant profile becomes the uniform density") {
    std::vector<double> v(g.n_points, 3.7);
    auto d = normalize_to_density(v, g);
    for (double p : d.pdf) CHECK(p == doctest::Approx(1.0 / 40.0).epsilon(1e-12));
  }
  SUBCASE("scale invariance") {
    util::Rng rng(3);
    std::vector<double> v(g.n_points);
    for (auto& x : v) x = rng.uniform(0.0, 2.0);
    auto d1 = normalize_to_density(v, g);
    for (auto& x : v) x *= 17.3;
    auto d2 = normalize_to_density(v, g);
    for (int i = 0; i < g.n_points; ++i) CHECK(d1.pdf[i] == doctest::Approx(d2.pdf[i]));
  }
  SUBCASE("pdf integrates to 1 and cdf ends at exactly 1") {
    auto d = gaussian_density(20.0, 3.0, g);
    double total = 0.0;
    for (int i = 1; i < g.n_points; ++i)
      total += 0.5 * (d.pdf[i - 1] + d.pdf[i]) * g.delta_t;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.cdf.back() == 1.0);
    for (int i = 1; i < g.n_points; ++i) CHECK(d.cdf[i] >= d.cdf[i - 1]);
  }
  SUBCASE("negative values are clamped before normalizing") {
    std::vector<double> v(g.n_points, -1.0);
    v[100] = 2.0;
    v[101] = 2.0;
    auto d = normalize_to_density(v, g);
    CHECK(d.pdf[50] == 0.0);
    CHECK(d.pdf[100] > 0.0);
  }
  SUBCASE("all-nonpositive input throws") {
    std::vector<double> v(g.n_points, -0.5);
    CHECK_THROWS_AS(normalize_to_density(v, g), DegeneratePulseError);
  }
}

TEST_CASE("quantile: generalized inverse") {
  TimeGrid g = unit_grid(40.0);

  SUBCASE("uniform density on [0, 40]: median at 20") {
    std::vector<double> v(g.n_points, 1.0);
    auto d = normalize_to_density(v, g);
    CHECK(quantile(d, 0.5) == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(quantile(d, 0.25) == doctest::Approx(10.0).epsilon(1e-6));
  }
  SUBCASE("u=0 and u=1 land on the support boundary") {
    std::vector<double> v(g.n_points, 0.0);
    for (int i = 128; i <= 255; ++i) v[i] = 1.0;
    auto d = normalize_to_density(v, g);
    CHECK(quantile(d, 0.0) == doctest::Approx(g.t(128)).epsilon(1e-9));
    CHECK(quantile(d, 1.0) == doctest::Approx(g.t(255)).epsilon(1e-9));
  }
  SUBCASE("monotone in u") {
    auto d = gaussian_density(17.0, 2.5, g);
    util::Rng rng(9);
    for (int k = 0; k < 1000; ++k) {
      double u1 = rng.uniform(), u2 = rng.uniform();
      if (u1 > u2) std::swap(u1, u2);
      CHECK(quantile(d, u1) <= quantile(d, u2) + 1e-15);
    }
  }
  SUBCASE("u outside [0,1] rejected") {
    auto d = gaussian_density(17.0, 2.5, g);
    CHECK_THROWS_AS(quantile(d, -0.01), InvalidInputError);
    CHECK_THROWS_AS(quantile(d, 1.01), InvalidInputError);
  }
}

TEST_CASE("w2_1d closed-form oracles") {
  SUBCASE("translated spikes: W2 equals the shift within 2 grid steps") {
    TimeGrid g = unit_grid(40.0);
    std::vector<double> a(g.n_points, 0.0), b(g.n_points, 0.0);
    a[100] = a[101] = 1.0;
    b[300] = b[301] = 1.0;
    double shift = g.t(300) - g.t(100);
    CHECK(std::abs(w2_1d(normalize_to_density(a, g), normalize_to_density(b, g)) - shift) <
          2.0 * g.delta_t);
  }
  SUBCASE("discretized gaussians, 5 ps shift, equal width: W2 = 5 ps within 1%") {
    TimeGrid g = pulsegen::standard_output_grid();
    auto da = gaussian_density(-2.5e-12, 2e-12, g);
    auto db = gaussian_density(2.5e-12, 2e-12, g);
    CHECK(w2_1d(da, db) == doctest::Approx(5e-12).epsilon(0.01));
  }
  SUBCASE("uniform[0,1] vs uniform[0,2]: W2 = 1/sqrt(3) within 1%") {
    TimeGrid ga = unit_grid(1.0), gb = unit_grid(2.0);
    std::vector<double> ua(ga.n_points, 1.0), ub(gb.n_points, 1.0);
    double w = w2_1d(normalize_to_density(ua, ga), normalize_to_density(ub, gb));
    CHECK(w == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.01));
  }
  SUBCASE("different-width gaussians: sqrt(dmu^2 + dsigma^2)") {
    TimeGrid g = pulsegen::standard_output_grid();
    auto da = gaussian_density(-3e-12, 1.5e-12, g);
    auto db = gaussian_density(4e-12, 3e-12, g);
    double expect = std::sqrt(49e-24 + 1.5e-12 * 1.5e-12);
    CHECK(w2_1d(da, db) == doctest::Approx(expect).epsilon(0.01));
  }
  SUBCASE("agrees with the independent dense-grid oracle on random densities") {
    TimeGrid g = unit_grid(10.0, 256);
    util::Rng rng(21);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> a(g.n_points), b(g.n_points);
      for (auto& v : a) v = rng.uniform(0.05, 1.0);
      for (auto& v : b) v = rng.uniform(0.05, 1.0);
      auto da = normalize_to_density(a, g), db = normalize_to_density(b, g);
      double w = w2_1d(da, db, 4096);
      double oracle = oracles::w2_brute_force(a, g, b, g, 40000);
      CHECK(w == doctest::Approx(oracle).epsilon(2e-3));
    }
  }
}

TEST_CASE("w2_1d metric properties") {
  TimeGrid g = unit_grid(30.0, 256);
  util::Rng rng(5);
  auto random_density = [&]() {
    std::vector<double> v(g.n_points);
    for (auto& x : v) x = rng.uniform(0.01, 1.0);
    return normalize_to_density(v, g);
  };

  SUBCASE("symmetry and identity") {
    for (int rep = 0; rep < 20; ++rep) {
      auto a = random_density(), b = random_density();
      CHECK(std::abs(w2_1d(a, b) - w2_1d(b, a)) < 1e-9);
      CHECK(w2_1d(a, a) < 1e-12);
    }
  }
  SUBCASE("triangle inequality on random triples") {
    for (int rep = 0; rep < 20; ++rep) {
      auto a = random_density(), b = random_density(), c = random_density();
      CHECK(w2_1d(a, c) <= w2_1d(a, b) + w2_1d(b, c) + 1e-6);
    }
  }
  SUBCASE("translation covariance") {
    auto base = gaussian_density(10.0, 1.5, g);
    for (int shift_samples : {4, 32, 100}) {
      std::vector<double> shifted(g.n_points, 0.0);
      for (int i = 0; i + shift_samples < g.n_points; ++i)
        shifted[i + shift_samples] = base.pdf[i];
      auto d2 = normalize_to_density(shifted, g);
      double delta = shift_samples * g.delta_t;
      CHECK(std::abs(w2_1d(base, d2) - delta) < 2.0 * g.delta_t);
    }
  }
  SUBCASE("n_quad below 64 rejected") {
    auto a = random_density();
    CHECK_THROWS_AS(w2_1d(a, a, 32), InvalidInputError);
  }
}

TEST_CASE("inverse transform sampling") {
  TimeGrid g = unit_grid(40.0);

  SUBCASE("spike density: every sample within one grid step of the spike") {
    std::vector<double> v(g.n_points, 0.0);
    v[200] = v[201] = 1.0;
    auto d = normalize_to_density(v, g);
    auto times = sample_emission_times(d, 1000, 4);
    for (double t : times) {
      CHECK(t >= g.t(199));
      CHECK(t <= g.t(202));
    }
  }
  SUBCASE("uniform density: KS statistic below 1.5x the 5% critical value") {
    std::vector<double> v(g.n_points, 1.0);
    auto d = normalize_to_density(v, g);
    const std::size_t n = 100000;
    auto times = sample_emission_times(d, n, 11);
    double ks = oracles::ks_statistic(
        times, [&](double t) { return std::clamp(t / 40.0, 0.0, 1.0); });
    CHECK(ks < 1.5 * 1.36 / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("histogram of 2e5 draws reproduces a smooth pdf with L1 < 0.02") {
    auto d = gaussian_density(20.0, 4.0, g);
    const std::size_t n = 200000;
    auto times = sample_emission_times(d, n, 123);
    const int bins = 200;
    std::vector<double> hist(bins, 0.0);
    double lo = g.t_min, w = 40.0 / bins;
    for (double t : times) {
      int b = std::clamp(static_cast<int>((t - lo) / w), 0, bins - 1);
      hist[b] += 1.0 / n;
    }
    // exact bin mass of the sampled (discrete piecewise-linear) distribution
    double l1 = 0.0;
    for (int b = 0; b < bins; ++b) {
      double u0, u1;
      {
        // cdf evaluated by linear interpolation on the density grid
        auto cdf_at = [&](double t) {
          if (t <= g.t_min) return 0.0;
          if (t >= g.t_max()) return 1.0;
          double x = (t - g.t_min) / g.delta_t;
          int i = static_cast<int>(x);
          double f = x - i;
          return d.cdf[i] * (1 - f) + d.cdf[i + 1] * f;
        };
        u0 = cdf_at(lo + b * w);
        u1 = cdf_at(lo + (b + 1) * w);
      }
      l1 += std::abs(hist[b] - (u1 - u0));
    }
    CHECK(l1 < 0.02);
  }
  SUBCASE("deterministic per seed") {
    auto d = gaussian_density(15.0, 2.0, g);
    auto a = sample_emission_times(d, 64, 99);
    auto b = sample_emission_times(d, 64, 99);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}
