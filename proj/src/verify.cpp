#include "oswec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "oswec/parallel.hpp"

namespace oswec {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double phase_difference(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

std::vector<double> amplitudes(const ResponseMetrics& m) {
  std::vector<double> out;
  for (const auto& f : m.flaps) out.push_back(f.amplitude);
  return out;
}

}  // namespace

nlohmann::json OracleCase::describe() const {
  nlohmann::json flaps = nlohmann::json::array();
  for (const auto& f : forcing.flaps) {
    flaps.push_back({{"amplitude_Nm", f.amplitude}, {"phase_rad", f.phase}, {"fixed", f.fixed}});
  }
  nlohmann::json inertia = nlohmann::json::array();
  nlohmann::json damping = nlohmann::json::array();
  for (int i = 0; i < system.dof(); ++i) {
    nlohmann::json mi = nlohmann::json::array(), ci = nlohmann::json::array();
    for (int j = 0; j < system.dof(); ++j) {
      mi.push_back(system.inertia(i, j));
      ci.push_back(system.damping(i, j));
    }
    inertia.push_back(mi);
    damping.push_back(ci);
  }
  std::vector<double> stiffness(system.stiffness.data(), system.stiffness.data() + system.dof());
  return {{"dof", system.dof()},          {"inertia_kg_m2", inertia},
          {"damping_Nms_per_rad", damping}, {"stiffness_Nm_per_rad", stiffness},
          {"omega_rad_per_s", forcing.omega}, {"forcing", flaps}};
}

bool CaseReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

bool VerifyReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.passed(); });
}

OracleCase random_oracle_case(std::mt19937_64& rng, int dof) {
  const double mass = std::exp(uniform(rng, std::log(1e6), std::log(2e7)));
  const double wn = uniform(rng, 0.4, 1.2);
  const double k = mass * wn * wn;

  OracleCase c;
  c.system.stiffness = DofVector::Constant(dof, k);
  if (dof == 1) {
    const double zeta = uniform(rng, 0.02, 1.0);
    c.system.inertia = DofMatrix::Constant(1, 1, mass);
    c.system.damping = DofMatrix::Constant(1, 1, 2.0 * zeta * std::sqrt(k * mass));
  } else {
    // Draw the in-phase and out-of-phase modes, then recover the
    // symmetric matrices: M +/- I_lr and C +/- C_lr.
    const double m_in = mass * uniform(rng, 0.8, 1.2);
    const double m_out = mass * uniform(rng, 0.8, 1.2);
    const double c_in = 2.0 * uniform(rng, 0.02, 1.0) * std::sqrt(k * m_in);
    const double c_out = 2.0 * uniform(rng, 0.02, 1.0) * std::sqrt(k * m_out);
    c.system.inertia.resize(2, 2);
    c.system.damping.resize(2, 2);
    c.system.inertia << 0.5 * (m_in + m_out), 0.5 * (m_in - m_out), 0.5 * (m_in - m_out), 0.5 * (m_in + m_out);
    c.system.damping << 0.5 * (c_in + c_out), 0.5 * (c_in - c_out), 0.5 * (c_in - c_out), 0.5 * (c_in + c_out);
  }
  c.forcing.omega = std::sqrt(k / c.system.inertia(0, 0)) * std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
  for (int i = 0; i < dof; ++i) {
    const double amp = uniform(rng, 1e5, 1.5e6);
    const double phase = i == 0 ? 0.0 : uniform(rng, -std::numbers::pi, std::numbers::pi);
    c.forcing.flaps.push_back({amp, phase, false});
  }
  return c;
}

CaseReport check_oracle_case(const OracleCase& input, const VerifyOptions& options) {
  CaseReport report;
  report.input = input;
  const auto& cfg = options.integration;

  const ResponseRecord rec = integrate(input.system, input.forcing, cfg);
  const ResponseMetrics m = response_metrics(rec, input.forcing.omega, cfg);
  const auto oracle = freq_domain_solve(input.system, input.forcing);

  report.properties.push_back({"steady_state", rec.steady,
                               fmt::format("{} periods integrated", rec.periods)});

  // Time domain against the frequency-domain solve.
  double scale = 0.0;
  for (const auto& z : oracle) scale = std::max(scale, std::abs(z));
  PropertyResult freq{"freq_vs_time", true, ""};
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const double expected = std::abs(oracle[i]);
    const double got = m.flaps[i].amplitude;
    if (expected <= 1e-3 * scale || scale == 0.0) {
      // Nearly motionless flap: compare on the scale of the system response.
      const double err = scale == 0.0 ? got : std::abs(got - expected) / scale;
      if (!(err <= options.amplitude_tol)) freq.passed = false;
      freq.detail += fmt::format("flap {}: |theta| {:.6g} vs {:.6g} (near zero); ", i, got, expected);
      continue;
    }
    const double amp_err = std::abs(got - expected) / expected;
    const double ph_err = phase_difference(m.flaps[i].phase, std::arg(oracle[i]));
    if (!(amp_err <= options.amplitude_tol) || !(ph_err <= options.phase_tol)) freq.passed = false;
    freq.detail += fmt::format("flap {}: amplitude error {:.3e}, phase error {:.3e} rad; ", i, amp_err, ph_err);
  }
  report.properties.push_back(std::move(freq));

  // Input power against dissipation.
  SystemMatrices dissipation = input.system;
  if (options.flip_dissipation_sign) dissipation.damping = -dissipation.damping;
  const PowerBalance pb = power_balance(rec, dissipation, input.forcing, cfg);
  report.properties.push_back({"energy_balance", pb.relative_error() <= options.balance_tol,
                               fmt::format("input {:.6g} W, dissipated {:.6g} W, relative error {:.3e}",
                                           pb.input, pb.dissipated, pb.relative_error())});

  // Scaling the forcing scales the response.
  constexpr double kScale = 2.5;
  ForcingSpec scaled = input.forcing;
  for (auto& f : scaled.flaps) f.amplitude *= kScale;
  const auto base = amplitudes(m);
  const auto big = amplitudes(response_metrics(integrate(input.system, scaled, cfg), scaled.omega, cfg));
  const double ref = std::max(1e-300, *std::max_element(base.begin(), base.end()));
  double lin_err = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    lin_err = std::max(lin_err, std::abs(big[i] - kScale * base[i]) / (kScale * ref));
  }
  if (*std::max_element(base.begin(), base.end()) == 0.0) {
    lin_err = *std::max_element(big.begin(), big.end()) == 0.0 ? 0.0 : 1.0;
  }
  report.properties.push_back({"linearity", lin_err <= options.linearity_tol,
                               fmt::format("relative error {:.3e} at scale {}", lin_err, kScale)});
  return report;
}

VerifyReport run_oracle_suite(const VerifyOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<OracleCase> inputs;
  for (int i = 0; i < options.cases; ++i) inputs.push_back(random_oracle_case(rng, i % 2 == 0 ? 1 : 2));

  VerifyReport report;
  report.cases.resize(inputs.size());
  parallel_for(inputs.size(), options.workers, [&](std::size_t i) {
    report.cases[i] = check_oracle_case(inputs[i], options);
    report.cases[i].index = static_cast<int>(i);
  });
  return report;
}

}  // namespace oswec
