#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "oswec/dynamics.hpp"
#include "oswec/error.hpp"

using namespace oswec;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// I + I_a = 1e7, C = 1e6, k = 4.375e6: natural period 9.5 s.
const FlapProperties kFlap{1.0e7, 4.375e6};
const HydroCoefficients kIsolated{0.0, 1.0e6, 0.0, 0.0};

ForcingSpec harmonic(double period, std::vector<FlapForcing> flaps) {
  return ForcingSpec{kTwoPi / period, std::move(flaps)};
}

// Scalar steady-state amplitude of M x'' + C x' + K x = F sin(w t).
double one_dof_amplitude(double m, double c, double k, double f, double w) {
  return f / std::hypot(k - m * w * w, c * w);
}

std::vector<double> sampled(double amplitude, double omega, double phase, double dt, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = amplitude * std::sin(omega * static_cast<double>(i) * dt + phase);
  return out;
}

}  // namespace

TEST_CASE("assemble_system") {
  SUBCASE("single flap") {
    const auto s = assemble_system(kFlap, kIsolated, 1);
    CHECK(s.dof() == 1);
    CHECK(s.inertia(0, 0) == 1.0e7);
    CHECK(s.damping(0, 0) == 1.0e6);
    CHECK(s.stiffness(0) == 4.375e6);
  }
  SUBCASE("single flap ignores coupling") {
    const auto s = assemble_system(kFlap, {0.0, 1.0e6, -2.0e6, -1.5e5}, 1);
    CHECK(s.inertia.size() == 1);
    CHECK(s.damping(0, 0) == 1.0e6);
  }
  SUBCASE("zero coupling is block diagonal") {
    const auto s = assemble_system(kFlap, kIsolated, 2);
    CHECK(s.inertia(0, 1) == 0.0);
    CHECK(s.damping(1, 0) == 0.0);
    CHECK(s.inertia(1, 1) == 1.0e7);
  }
  SUBCASE("symmetric off-diagonals") {
    const auto s = assemble_system({8.0e6, 4.375e6}, {2.0e6, 1.0e6, -2.0e6, -1.5e5}, 2);
    CHECK(s.inertia(0, 0) == 1.0e7);
    CHECK(s.inertia(0, 1) == -2.0e6);
    CHECK(s.inertia(1, 0) == -2.0e6);
    CHECK(s.damping(0, 1) == -1.5e5);
    CHECK(s.damping(1, 0) == -1.5e5);
    CHECK(s.stiffness(1) == 4.375e6);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(assemble_system(kFlap, {0.0, 1.0e6, 1.0e7, 0.0}, 2), InvalidInput);
    CHECK_THROWS_AS(assemble_system(kFlap, {0.0, 1.0e6, 0.0, -1.0e6}, 2), InvalidInput);
    CHECK_THROWS_AS(assemble_system(kFlap, kIsolated, 3), InvalidInput);
    CHECK_THROWS_AS(assemble_system({0.0, 1.0}, kIsolated, 1), InvalidInput);
    CHECK_THROWS_AS(assemble_system(kFlap, {-1.0, 1.0e6, 0.0, 0.0}, 1), InvalidInput);
    CHECK_THROWS_AS(assemble_system(kFlap, {0.0, 0.0, 0.0, 0.0}, 1), InvalidInput);
  }
}

TEST_CASE("integrate") {
  const IntegrationConfig cfg;

  SUBCASE("zero forcing gives a zero record") {
    const auto s = assemble_system(kFlap, kIsolated, 2);
    const auto rec = integrate(s, harmonic(8.5, {{0.0, 0.0, false}, {0.0, 1.0, false}}), cfg);
    CHECK(rec.steady);
    CHECK(rec.periods == cfg.ramp_periods + cfg.measure_periods);
    for (const auto& f : rec.flaps) {
      for (double x : f.rotation) CHECK(x == 0.0);
      for (double x : f.rate) CHECK(x == 0.0);
    }
  }

  SUBCASE("closed-form resonance") {
    const auto s = assemble_system(kFlap, kIsolated, 1);
    const auto forcing = harmonic(9.5, {{0.6e6, 0.0, false}});
    const auto rec = integrate(s, forcing, cfg);
    CHECK(rec.steady);
    const auto m = response_metrics(rec, forcing.omega, cfg);
    // T0 / (C w) at resonance.
    CHECK(m.flaps[0].amplitude == doctest::Approx(0.9071).epsilon(0.005));
    CHECK(m.flaps[0].rms_rotation == doctest::Approx(0.6414).epsilon(0.005));
    CHECK(rec.dt == doctest::Approx(9.5 / 200.0));
    CHECK(rec.size() == static_cast<std::size_t>(rec.periods * 200 + 1));
  }

  SUBCASE("symmetric system with equal forcing gives identical flaps") {
    const auto s = assemble_system({8.0e6, 4.375e6}, {2.0e6, 1.0e6, -3.0e5, -2.0e5}, 2);
    const auto rec = integrate(s, harmonic(8.5, {{1.0e6, 0.3, false}, {1.0e6, 0.3, false}}), cfg);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      scale = std::max(scale, std::abs(rec.flaps[0].rotation[i]));
      diff = std::max(diff, std::abs(rec.flaps[0].rotation[i] - rec.flaps[1].rotation[i]));
      diff = std::max(diff, std::abs(rec.flaps[0].rate[i] - rec.flaps[1].rate[i]));
    }
    CHECK(scale > 0.0);
    CHECK(diff <= 1e-13 * scale);
  }

  SUBCASE("fixed flap is held at rest") {
    const auto s = assemble_system(kFlap, {0.0, 1.0e6, -1.0e6, -3.0e5}, 2);
    const auto rec = integrate(s, harmonic(8.5, {{0.0, 0.0, true}, {1.0e6, 0.0, false}}), cfg);
    for (double x : rec.flaps[0].rotation) CHECK(x == 0.0);
    for (double x : rec.flaps[0].rate) CHECK(x == 0.0);
    // With the left flap eliminated the right flap is a one-DOF oscillator.
    const auto m = response_metrics(rec, kTwoPi / 8.5, cfg);
    CHECK(m.flaps[1].amplitude ==
          doctest::Approx(one_dof_amplitude(1.0e7, 1.0e6, 4.375e6, 1.0e6, kTwoPi / 8.5)).epsilon(1e-3));
  }

  SUBCASE("non-convergence is flagged") {
    IntegrationConfig short_run;
    short_run.max_periods = 3;
    short_run.convergence_tol = 1e-15;
    const auto rec = integrate(assemble_system(kFlap, kIsolated, 1), harmonic(9.5, {{1.0e6, 0.0, false}}), short_run);
    CHECK_FALSE(rec.steady);
    CHECK(rec.periods == 3);
  }

  SUBCASE("overflow raises a numerical error naming the step") {
    // Light, stiff and hugely forced: the state leaves double range in a few steps.
    SystemMatrices s;
    s.inertia = DofMatrix::Constant(1, 1, 1e-20);
    s.damping = DofMatrix::Constant(1, 1, 1e-20);
    s.stiffness = DofVector::Constant(1, 1.0);
    CHECK_THROWS_WITH_AS(integrate(s, harmonic(9.5, {{1e300, 0.0, false}}), cfg),
                         doctest::Contains("step"), NumericalError);
  }

  SUBCASE("dimension mismatch") {
    const auto s = assemble_system(kFlap, kIsolated, 1);
    CHECK_THROWS_AS(integrate(s, harmonic(9.5, {{1.0, 0.0, false}, {1.0, 0.0, false}}), cfg), InvalidInput);
    CHECK_THROWS_AS(integrate(s, harmonic(9.5, {{-1.0, 0.0, false}}), cfg), InvalidInput);
  }
}

TEST_CASE("freq_domain_solve") {
  SUBCASE("one DOF off resonance matches the scalar formula") {
    const auto s = assemble_system(kFlap, kIsolated, 1);
    for (double period : {6.0, 7.5, 11.0, 14.0}) {
      const double w = kTwoPi / period;
      const auto z = freq_domain_solve(s, harmonic(period, {{0.8e6, 0.0, false}}));
      CHECK(std::abs(z[0]) == doctest::Approx(one_dof_amplitude(1.0e7, 1.0e6, 4.375e6, 0.8e6, w)).epsilon(1e-12));
    }
  }

  SUBCASE("symmetric modes map onto one DOF with coupling added or subtracted") {
    const HydroCoefficients coeffs{1.5e6, 1.0e6, -4.0e5, -2.5e5};
    const FlapProperties flap{8.5e6, 4.375e6};
    const auto s = assemble_system(flap, coeffs, 2);
    const double m = flap.inertia_dry + coeffs.added_inertia;
    for (double period : {7.5, 8.5, 9.5, 10.5}) {
      const double w = kTwoPi / period;
      const auto in = freq_domain_solve(s, harmonic(period, {{1.0e6, 0.0, false}, {1.0e6, 0.0, false}}));
      const auto out = freq_domain_solve(s, harmonic(period, {{1.0e6, 0.0, false}, {1.0e6, std::numbers::pi, false}}));
      const double a_in = one_dof_amplitude(m + coeffs.coupling_inertia, 1.0e6 + coeffs.coupling_damping, 4.375e6, 1.0e6, w);
      const double a_out = one_dof_amplitude(m - coeffs.coupling_inertia, 1.0e6 - coeffs.coupling_damping, 4.375e6, 1.0e6, w);
      CHECK(std::abs(in[0]) == doctest::Approx(a_in).epsilon(1e-12));
      CHECK(std::abs(in[1]) == doctest::Approx(a_in).epsilon(1e-12));
      CHECK(std::abs(out[0]) == doctest::Approx(a_out).epsilon(1e-12));
      CHECK(std::abs(out[1]) == doctest::Approx(a_out).epsilon(1e-12));
    }
  }

  SUBCASE("fixed flaps are eliminated and report zero") {
    const auto s = assemble_system(kFlap, {0.0, 1.0e6, -1.0e6, -3.0e5}, 2);
    const auto z = freq_domain_solve(s, harmonic(8.5, {{0.0, 0.0, true}, {1.0e6, 0.0, false}}));
    CHECK(z[0] == std::complex<double>(0.0, 0.0));
    CHECK(std::abs(z[1]) == doctest::Approx(one_dof_amplitude(1.0e7, 1.0e6, 4.375e6, 1.0e6, kTwoPi / 8.5)));
  }

  SUBCASE("undamped resonance is singular") {
    SystemMatrices s;
    s.inertia = DofMatrix::Constant(1, 1, 1.0);
    s.damping = DofMatrix::Constant(1, 1, 0.0);
    s.stiffness = DofVector::Constant(1, 4.0);
    CHECK_THROWS_AS(freq_domain_solve(s, ForcingSpec{2.0, {{1.0, 0.0, false}}}), NumericalError);
  }
}

TEST_CASE("harmonic_fit") {
  const double w = 0.7;
  const double dt = kTwoPi / w / 200.0;
  const std::size_t n = 200 * 6 + 1;

  SUBCASE("exact harmonics") {
    const auto a = sampled(0.5, w, 0.0, dt, n);
    const auto fit = harmonic_fit(a, dt, w, {0, n - 1});
    CHECK(fit.amplitude == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(fit.phase) < 1e-9);

    const auto b = sampled(0.5, w, std::numbers::pi / 3.0, dt, n);
    CHECK(std::abs(harmonic_fit(b, dt, w, {0, n - 1}).phase - std::numbers::pi / 3.0) < 1e-9);

    // Window starting mid-record and not on a period boundary.
    CHECK(std::abs(harmonic_fit(b, dt, w, {137, 137 + 700}).phase - std::numbers::pi / 3.0) < 1e-9);
  }

  SUBCASE("phase lies in (-pi, pi]") {
    const auto c = sampled(1.0, w, std::numbers::pi, dt, n);
    const auto fit = harmonic_fit(c, dt, w, {0, n - 1});
    CHECK(fit.phase == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    CHECK(fit.phase <= std::numbers::pi);
  }

  SUBCASE("zero signal has zero phase") {
    const std::vector<double> z(n, 0.0);
    const auto fit = harmonic_fit(z, dt, w, {0, n - 1});
    CHECK(fit.amplitude == 0.0);
    CHECK(fit.phase == 0.0);
  }

  SUBCASE("noisy harmonic, Monte Carlo") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto y = sampled(1.0, w, 0.4, dt, n);
      for (double& v : y) v += noise(rng);
      worst = std::max(worst, std::abs(harmonic_fit(y, dt, w, {0, n - 1}).amplitude - 1.0));
    }
    CHECK(worst < 0.005);
  }

  SUBCASE("window too short") {
    const auto a = sampled(0.5, w, 0.0, dt, n);
    CHECK_THROWS_AS(harmonic_fit(a, dt, w, {0, 599}), InvalidInput);
    CHECK_NOTHROW(harmonic_fit(a, dt, w, {0, 600}));
    CHECK_THROWS_AS(harmonic_fit(a, dt, w, {0, n + 1}), InvalidInput);
  }
}

TEST_CASE("response_metrics") {
  IntegrationConfig cfg;
  cfg.measure_periods = 4;
  const double w = 0.7;

  SUBCASE("pure harmonic") {
    ResponseRecord rec;
    rec.omega = w;
    rec.steps_per_period = 100;
    rec.dt = kTwoPi / w / 100.0;
    rec.periods = 6;
    rec.steady = true;
    rec.flaps.push_back({sampled(0.2, w, 0.0, rec.dt, 601), std::vector<double>(601, 0.0)});
    const auto m = response_metrics(rec, w, cfg);
    CHECK(m.flaps[0].rms_rotation == doctest::Approx(0.2 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(m.flaps[0].rms_rotation == doctest::Approx(0.1414).epsilon(1e-3));
    CHECK(m.flaps[0].amplitude == doctest::Approx(m.flaps[0].rms_rotation * std::sqrt(2.0)));
    CHECK(m.cycles_used == 4);
    CHECK(m.steady);
  }

  SUBCASE("zero record") {
    ResponseRecord rec;
    rec.omega = w;
    rec.steps_per_period = 100;
    rec.dt = kTwoPi / w / 100.0;
    rec.periods = 6;
    rec.flaps.push_back({std::vector<double>(601, 0.0), std::vector<double>(601, 0.0)});
    const auto m = response_metrics(rec, w, cfg);
    CHECK(m.flaps[0].rms_rotation == 0.0);
    CHECK(m.flaps[0].amplitude == 0.0);
    CHECK(m.flaps[0].phase == 0.0);
  }

  SUBCASE("window shorter than three periods propagates the fit error") {
    ResponseRecord rec;
    rec.omega = w;
    rec.steps_per_period = 100;
    rec.dt = kTwoPi / w / 100.0;
    rec.periods = 2;
    rec.flaps.push_back({std::vector<double>(201, 0.0), std::vector<double>(201, 0.0)});
    CHECK_THROWS_AS(response_metrics(rec, w, cfg), InvalidInput);
  }

  CHECK_THROWS_AS(response_metrics(ResponseRecord{}, w, cfg), InvalidInput);
}

TEST_CASE("time and frequency domains agree on random systems") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const IntegrationConfig cfg;
  for (int trial = 0; trial < 12; ++trial) {
    const double m = 5e6 + 1e7 * u(rng);
    const double k = m * std::pow(0.4 + 0.8 * u(rng), 2);
    const double c = 2.0 * (0.05 + 0.5 * u(rng)) * std::sqrt(k * m);
    const HydroCoefficients coeffs{0.0, c, (u(rng) - 0.5) * 0.4 * m, (u(rng) - 0.5) * 0.8 * c};
    const auto s = assemble_system({m, k}, coeffs, 2);
    const ForcingSpec f{std::sqrt(k / m) * (0.5 + 1.5 * u(rng)),
                        {{1e6 * u(rng), 0.0, false}, {1e6 * u(rng), kTwoPi * u(rng), false}}};
    const auto rec = integrate(s, f, cfg);
    const auto metrics = response_metrics(rec, f.omega, cfg);
    const auto z = freq_domain_solve(s, f);
    CAPTURE(trial);
    REQUIRE(rec.steady);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(metrics.flaps[i].amplitude == doctest::Approx(std::abs(z[i])).epsilon(0.01));
      CHECK(std::abs(std::remainder(metrics.flaps[i].phase - std::arg(z[i]), kTwoPi)) < 0.02);
    }

    // Power balance over the measured window.
    const auto pb = power_balance(rec, s, f, cfg);
    CHECK(pb.relative_error() < 0.01);

    // Linearity.
    ForcingSpec scaled = f;
    for (auto& fl : scaled.flaps) fl.amplitude *= 3.0;
    const auto big = response_metrics(integrate(s, scaled, cfg), f.omega, cfg);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(big.flaps[i].amplitude == doctest::Approx(3.0 * metrics.flaps[i].amplitude).epsilon(1e-6));
    }
  }
}

TEST_CASE("halving the step barely moves the steady amplitude") {
  const auto s = assemble_system({8.0e6, 4.375e6}, {2.0e6, 1.0e6, -3.0e5, -2.0e5}, 2);
  const auto f = harmonic(8.5, {{1.0e6, 0.0, false}, {0.7e6, 1.0, false}});
  IntegrationConfig coarse;
  IntegrationConfig fine;
  fine.steps_per_period = 2 * coarse.steps_per_period;
  coarse.convergence_tol = fine.convergence_tol = 1e-9;
  coarse.max_periods = fine.max_periods = 400;
  const auto a = response_metrics(integrate(s, f, coarse), f.omega, coarse);
  const auto b = response_metrics(integrate(s, f, fine), f.omega, fine);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(a.flaps[i].amplitude / b.flaps[i].amplitude - 1.0) < 1e-4);
  }
}

TEST_CASE("time-series CSV") {
  const auto s = assemble_system(kFlap, kIsolated, 2);
  IntegrationConfig cfg;
  cfg.ramp_periods = cfg.measure_periods = 1;
  cfg.steps_per_period = 4;
  const auto rec = integrate(s, harmonic(9.5, {{1.0, 0.0, false}, {1.0, 0.0, false}}), cfg);
  std::ostringstream out;
  write_timeseries_csv(out, rec);
  std::istringstream in(out.str());
  std::string comment, header, first;
  std::getline(in, comment);
  std::getline(in, header);
  std::getline(in, first);
  CHECK(comment.rfind("#", 0) == 0);
  CHECK(header == "t,theta_l,theta_r,omega_l,omega_r");
  CHECK(first == "0,0,0,0,0");

  const auto single = integrate(assemble_system(kFlap, kIsolated, 1), harmonic(9.5, {{1.0, 0.0, false}}), cfg);
  std::ostringstream out1;
  write_timeseries_csv(out1, single);
  CHECK(out1.str().find("\nt,theta_l,omega_l\n") != std::string::npos);
}
