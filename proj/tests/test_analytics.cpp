#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tleak/analytics.hpp"
#include "tleak/dynamics.hpp"
#include "tleak/errors.hpp"

using namespace tleak;

TEST_CASE("sudden_even_prediction") {
  CHECK(sudden_even_prediction(40, 0.03) == doctest::Approx(4.275e-3).epsilon(1e-12));
  CHECK(sudden_even_prediction(2, 0.3) == 0.0);
  CHECK(sudden_even_prediction(42, 0.1) == doctest::Approx(0.05).epsilon(1e-12));
  // Same physics at another hopping scale with Delta = w.
  CHECK(sudden_even_prediction(40, 0.06, 1.0) == doctest::Approx(4.275e-3).epsilon(1e-12));
}

TEST_CASE("sudden_even_integral") {
  for (double mu : {0.01, 0.03, 0.1}) {
    CHECK(sudden_even_integral(40, 0.0, mu, 0.5, 0.5) == doctest::Approx(sudden_even_prediction(40, mu)).epsilon(1e-6));
  }
  CHECK(sudden_even_integral(40, 0.2, 0.2, 0.5, 0.5) == 0.0);
  // Independent trapezoid evaluation of the same Brillouin-zone average away from the sweet spot.
  const double w = 0.5, d = 0.3, mu_in = 0.1, mu_fin = 0.2;
  const int m = 20000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double k = -std::numbers::pi + 2 * std::numbers::pi * i / m;
    const double e = std::hypot(mu_in + 2 * w * std::cos(k), 2 * d * std::sin(k));
    const double beta = -2 * d * std::sin(k) * (mu_fin - mu_in) / (2 * e * e);
    sum += beta * beta;
  }
  const double trapezoid = 38.0 / (2 * std::numbers::pi) * sum * (2 * std::numbers::pi / m);
  CHECK(sudden_even_integral(40, mu_in, mu_fin, w, d) == doctest::Approx(trapezoid).epsilon(1e-9));
}

TEST_CASE("sudden_even_integral tracks the simulated quench at N=100") {
  const double pred = sudden_even_integral(100, 0.0, 0.01, 0.5, 0.5);
  const double sim = sudden_quench({100, 0.5, 0.5}, 0.0, 0.01).l_even;
  CHECK(sim == doctest::Approx(pred).epsilon(0.1));
}

TEST_CASE("sudden_odd_prediction") {
  const ChainParams p{40, 0.5, 0.5};
  const ModeBasis a = tetron_mode_basis(p, 0.0);
  const ModeBasis b = tetron_mode_basis(p, 0.03);
  CHECK(std::abs(sudden_odd_prediction(a, a)) < 1e-14);
  for (double x : mzm_overlaps(a, b)) CHECK(x > 0.99);
  const double small = sudden_odd_prediction(tetron_mode_basis({4, 0.5, 0.5}, 0.0), tetron_mode_basis({4, 0.5, 0.5}, 0.03));
  const double large = sudden_odd_prediction(tetron_mode_basis({100, 0.5, 0.5}, 0.0), tetron_mode_basis({100, 0.5, 0.5}, 0.03));
  CHECK(std::abs(small - large) < 1e-6);
  const SuddenPrediction pred = sudden_prediction(a, b);
  CHECK(pred.l_odd_tilde == doctest::Approx(sudden_odd_prediction(a, b)));
  CHECK(pred.l_even_tilde == doctest::Approx(4.275e-3));
}

TEST_CASE("near-adiabatic envelope and dynamic phase") {
  CHECK(near_adiabatic_even_envelope(40, 1e-3) == doctest::Approx(5e-6));
  CHECK(near_adiabatic_even_envelope(40, 0.0) == 0.0);
  CHECK(dynamic_phase_frequency(0.03, 1.0) == doctest::Approx(0.030));
  CHECK(2 * dynamic_phase_frequency(0.03, 1.0) == doctest::Approx(0.060));
  CHECK(dynamic_phase_frequency(0.0, 0.7) == 0.0);
  CHECK(dynamic_phase_frequency(0.06, 0.5) == doctest::Approx(2 * dynamic_phase_frequency(0.03, 0.5)));
  CHECK(dynamic_phase_frequency(0.03, 0.8) == doctest::Approx(2 * dynamic_phase_frequency(0.03, 0.4)));
  CHECK(dynamic_phase_frequency_midramp(0.03, 0.5) == doctest::Approx(0.03 * 0.985));
}

TEST_CASE("fit_half_lz recovers noiseless data") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 300; ++i) {
    const double v = 4e-4 + 6e-4 * i / 299.0;
    s.emplace_back(v, 1.0 * v * v + 0.5 * v * v * std::cos(0.03 / v));
  }
  const FitResult f = fit_half_lz(s);
  CHECK(f.family == "half_lz");
  CHECK(f.at("k1") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.at("m1") == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.at("k2") == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(f.at("m2") == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.at("omega") == doctest::Approx(0.03).epsilon(1e-6));
  CHECK(f.r_squared > 1.0 - 1e-10);
  CHECK(f.residual_norm >= 0.0);
  CHECK(f.points_used == 300);
  CHECK_THROWS_AS(f.at("nope"), InvalidParameter);
}

TEST_CASE("fit_half_lz rejects a window shorter than one period") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 50; ++i) {
    const double v = 9.9e-4 + 1e-7 * i;
    s.emplace_back(v, v * v * (1 + 0.3 * std::cos(0.03 / v)));
  }
  CHECK_THROWS_AS(fit_half_lz(s), FitFailure);
}

TEST_CASE("fit_power_approach") {
  std::vector<std::pair<double, double>> s;
  for (double v = 1.0; v <= 100.0; v *= 1.3) s.emplace_back(v, 0.01 - 3.0 / (v * v));
  const FitResult f = fit_power_approach(s, 0.01);
  CHECK(f.at("slope") == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(f.at("k") == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  // Points at or above the limit are excluded; too many of them is a failure.
  std::vector<std::pair<double, double>> bad = s;
  for (auto& p : bad) p.second = 0.02;
  CHECK_THROWS_AS(fit_power_approach(bad, 0.01), FitFailure);
}

TEST_CASE("fit_linear_in_n") {
  std::vector<std::pair<double, double>> s;
  for (int n = 10; n <= 100; n += 10) s.emplace_back(n, 2.5e-4 * n - 1e-3);
  const FitResult f = fit_linear_in_n(s);
  CHECK(f.at("slope") == doctest::Approx(2.5e-4).epsilon(1e-12));
  CHECK(f.at("intercept") == doctest::Approx(-1e-3).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  s.resize(3);
  CHECK_THROWS_AS(fit_linear_in_n(s), FitFailure);
}

TEST_CASE("sudden scaling with N") {
  std::vector<std::pair<double, double>> even, odd;
  for (int n = 10; n <= 100; n += 10) {
    const LeakageRecord r = sudden_quench({n, 0.5, 0.5}, 0.0, 0.03);
    even.emplace_back(n, r.l_even);
    odd.emplace_back(n, r.l_odd);
  }
  const FitResult fe = fit_linear_in_n(even);
  CHECK(fe.at("slope") == doctest::Approx(0.03 * 0.03 / 8).epsilon(0.1));
  CHECK(fe.r_squared > 0.999);
  const FitResult fo = fit_linear_in_n(odd);
  double mean = 0.0;
  for (auto& p : odd) mean += p.second / odd.size();
  CHECK(std::abs(fo.at("slope")) * 100 < 0.05 * mean);
}
