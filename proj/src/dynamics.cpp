#include "oswec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "oswec/error.hpp"

namespace oswec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using ComplexMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
using ComplexVector = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1, 0, kMaxDof, 1>;

double wrap_phase(double phase) {
  double p = std::remainder(phase, kTwoPi);
  if (p <= -std::numbers::pi) p += kTwoPi;
  return p;
}

void require_matching(const SystemMatrices& system, const ForcingSpec& forcing) {
  forcing.validate();
  if (static_cast<int>(forcing.flaps.size()) != system.dof()) {
    throw InvalidInput(fmt::format("forcing has {} flaps but the system has {} degrees of freedom",
                                   forcing.flaps.size(), system.dof()));
  }
}

std::vector<int> free_indices(const ForcingSpec& forcing) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(forcing.flaps.size()); ++i) {
    if (!forcing.flaps[static_cast<std::size_t>(i)].fixed) out.push_back(i);
  }
  return out;
}

// The system restricted to the flaps that are free to rotate.
struct ReducedSystem {
  std::vector<int> index;
  DofMatrix inertia;
  DofMatrix damping;
  DofVector stiffness;
  DofVector amplitude;
  DofVector phase;

  int size() const { return static_cast<int>(index.size()); }
};

ReducedSystem reduce(const SystemMatrices& system, const ForcingSpec& forcing) {
  ReducedSystem r;
  r.index = free_indices(forcing);
  const int n = r.size();
  r.inertia.resize(n, n);
  r.damping.resize(n, n);
  r.stiffness.resize(n);
  r.amplitude.resize(n);
  r.phase.resize(n);
  for (int a = 0; a < n; ++a) {
    const int i = r.index[static_cast<std::size_t>(a)];
    r.stiffness(a) = system.stiffness(i);
    r.amplitude(a) = forcing.flaps[static_cast<std::size_t>(i)].amplitude;
    r.phase(a) = forcing.flaps[static_cast<std::size_t>(i)].phase;
    for (int b = 0; b < n; ++b) {
      const int j = r.index[static_cast<std::size_t>(b)];
      r.inertia(a, b) = system.inertia(i, j);
      r.damping(a, b) = system.damping(i, j);
    }
  }
  return r;
}

double rms(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x * x;
  return std::sqrt(sum / static_cast<double>(xs.size()));
}

}  // namespace

double ForcingSpec::period() const { return kTwoPi / omega; }

void ForcingSpec::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidInput(fmt::format("forcing frequency must be positive, got {}", omega));
  }
  if (flaps.empty() || flaps.size() > static_cast<std::size_t>(kMaxDof)) {
    throw InvalidInput(fmt::format("forcing must describe 1 or 2 flaps, got {}", flaps.size()));
  }
  for (const auto& f : flaps) {
    if (!(f.amplitude >= 0.0) || !std::isfinite(f.amplitude)) {
      throw InvalidInput(fmt::format("torque amplitude must be non-negative, got {}", f.amplitude));
    }
    if (!std::isfinite(f.phase)) throw InvalidInput("forcing phase must be finite");
  }
}

void IntegrationConfig::validate() const {
  if (steps_per_period < 1 || ramp_periods < 1 || measure_periods < 1 || max_periods < 1) {
    throw InvalidInput("integration step and period counts must be at least 1");
  }
  if (!(convergence_tol > 0.0)) {
    throw InvalidInput(fmt::format("convergence tolerance must be positive, got {}", convergence_tol));
  }
}

double PowerBalance::relative_error() const {
  const double scale = std::max(std::abs(input), std::abs(dissipated));
  if (scale == 0.0) return 0.0;
  return std::abs(input - dissipated) / scale;
}

SystemMatrices assemble_system(const FlapProperties& props, const HydroCoefficients& coeffs,
                               int dof) {
  props.validate();
  coeffs.validate();
  if (dof != 1 && dof != 2) throw InvalidInput(fmt::format("dof must be 1 or 2, got {}", dof));

  const double diag_inertia = props.inertia_dry + coeffs.added_inertia;
  SystemMatrices s;
  s.inertia = DofMatrix::Constant(dof, dof, coeffs.coupling_inertia);
  s.damping = DofMatrix::Constant(dof, dof, coeffs.coupling_damping);
  s.inertia.diagonal().setConstant(diag_inertia);
  s.damping.diagonal().setConstant(coeffs.damping);
  s.stiffness = DofVector::Constant(dof, props.stiffness);

  if (dof == 2) {
    if (std::abs(coeffs.coupling_inertia) >= diag_inertia) {
      throw InvalidInput(fmt::format(
          "total inertia is not positive definite: |I_a_lr| = {} >= I + I_a = {}",
          std::abs(coeffs.coupling_inertia), diag_inertia));
    }
    if (std::abs(coeffs.coupling_damping) >= coeffs.damping) {
      throw InvalidInput(fmt::format(
          "damping is not positive definite: |C_lr| = {} >= C = {} (one mode is undamped)",
          std::abs(coeffs.coupling_damping), coeffs.damping));
    }
  }
  return s;
}

ResponseRecord integrate(const SystemMatrices& system, const ForcingSpec& forcing,
                         const IntegrationConfig& cfg) {
  require_matching(system, forcing);
  cfg.validate();

  const int dof = system.dof();
  const ReducedSystem red = reduce(system, forcing);
  const int n = red.size();
  const int spp = cfg.steps_per_period;
  const double omega = forcing.omega;
  const double dt = forcing.period() / spp;
  const int min_periods = std::min(cfg.ramp_periods + cfg.measure_periods, cfg.max_periods);

  ResponseRecord rec;
  rec.dt = dt;
  rec.omega = omega;
  rec.steps_per_period = spp;
  rec.flaps.resize(static_cast<std::size_t>(dof));
  const auto reserve = static_cast<std::size_t>(min_periods) * static_cast<std::size_t>(spp) + 1;
  for (auto& f : rec.flaps) {
    f.rotation.reserve(reserve);
    f.rate.reserve(reserve);
  }

  const DofMatrix inv_inertia = red.inertia.inverse();
  DofVector theta = DofVector::Zero(n);
  DofVector rate = DofVector::Zero(n);

  const auto store = [&] {
    for (int i = 0; i < dof; ++i) {
      rec.flaps[static_cast<std::size_t>(i)].rotation.push_back(0.0);
      rec.flaps[static_cast<std::size_t>(i)].rate.push_back(0.0);
    }
    for (int a = 0; a < n; ++a) {
      auto& f = rec.flaps[static_cast<std::size_t>(red.index[static_cast<std::size_t>(a)])];
      f.rotation.back() = theta(a);
      f.rate.back() = rate(a);
    }
  };
  const auto accel = [&](double t, const DofVector& th, const DofVector& v) -> DofVector {
    DofVector torque(n);
    for (int a = 0; a < n; ++a) torque(a) = red.amplitude(a) * std::sin(omega * t + red.phase(a));
    return inv_inertia * (torque - red.damping * v - red.stiffness.cwiseProduct(th));
  };

  store();
  std::vector<double> last_rms(static_cast<std::size_t>(n), 0.0);
  std::size_t step = 0;
  for (int p = 1; p <= cfg.max_periods; ++p) {
    for (int s = 0; s < spp; ++s, ++step) {
      const double t = static_cast<double>(step) * dt;
      const DofVector k1x = rate;
      const DofVector k1v = accel(t, theta, rate);
      const DofVector k2x = rate + 0.5 * dt * k1v;
      const DofVector k2v = accel(t + 0.5 * dt, theta + 0.5 * dt * k1x, k2x);
      const DofVector k3x = rate + 0.5 * dt * k2v;
      const DofVector k3v = accel(t + 0.5 * dt, theta + 0.5 * dt * k2x, k3x);
      const DofVector k4x = rate + dt * k3v;
      const DofVector k4v = accel(t + dt, theta + dt * k3x, k4x);
      theta += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      rate += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!theta.allFinite() || !rate.allFinite()) {
        throw NumericalError(fmt::format("non-finite state at step {} (t = {:.6g} s)", step + 1,
                                         static_cast<double>(step + 1) * dt));
      }
      store();
    }
    rec.periods = p;

    // Per-cycle RMS of each free flap over the period just completed.
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto& rot = rec.flaps[static_cast<std::size_t>(red.index[static_cast<std::size_t>(a)])].rotation;
      const std::span<const double> cycle(rot.data() + (step - static_cast<std::size_t>(spp)),
                                          static_cast<std::size_t>(spp));
      const double now = rms(cycle);
      const double before = last_rms[static_cast<std::size_t>(a)];
      const double scale = std::max(now, before);
      if (scale > 0.0) worst = std::max(worst, std::abs(now - before) / scale);
      last_rms[static_cast<std::size_t>(a)] = now;
    }
    if (p >= min_periods && p >= 2 && worst < cfg.convergence_tol) {
      rec.steady = true;
      break;
    }
  }
  return rec;
}

std::vector<std::complex<double>> freq_domain_solve(const SystemMatrices& system,
                                                    const ForcingSpec& forcing) {
  require_matching(system, forcing);
  const ReducedSystem red = reduce(system, forcing);
  const int n = red.size();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(system.dof()), 0.0);
  if (n == 0) return out;

  const double w = forcing.omega;
  const std::complex<double> iw(0.0, w);
  ComplexMatrix a(n, n);
  ComplexVector f(n);
  for (int i = 0; i < n; ++i) {
    f(i) = std::polar(red.amplitude(i), red.phase(i));
    for (int j = 0; j < n; ++j) {
      a(i, j) = -w * w * red.inertia(i, j) + iw * red.damping(i, j);
    }
    a(i, i) += red.stiffness(i);
  }
  const double scale = a.cwiseAbs().maxCoeff();
  if (std::abs(a.determinant()) <= 1e-14 * std::pow(scale, n)) {
    throw NumericalError(fmt::format("dynamic stiffness matrix is singular at omega = {} rad/s", w));
  }
  const ComplexVector theta = a.partialPivLu().solve(f);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(red.index[static_cast<std::size_t>(i)])] = theta(i);
  return out;
}

HarmonicFit harmonic_fit(std::span<const double> series, double dt, double omega,
                         SampleWindow window) {
  if (!(omega > 0.0) || !(dt > 0.0)) throw InvalidInput("harmonic fit needs positive dt and omega");
  if (window.end > series.size() || window.begin >= window.end) {
    throw InvalidInput(fmt::format("fit window [{}, {}) is outside the series of length {}",
                                   window.begin, window.end, series.size()));
  }
  const double span = static_cast<double>(window.size()) * dt;
  const double needed = 3.0 * kTwoPi / omega;
  if (span < needed * (1.0 - 1e-9)) {
    throw InvalidInput(fmt::format("fit window spans {:.4g} s, needs at least 3 periods ({:.4g} s)",
                                   span, needed));
  }

  // Normal equations for [sin, cos].
  double ss = 0.0, sc = 0.0, cc = 0.0, ys = 0.0, yc = 0.0;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double s = std::sin(omega * t);
    const double c = std::cos(omega * t);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys += series[i] * s;
    yc += series[i] * c;
  }
  const double det = ss * cc - sc * sc;
  if (!(det > 0.0)) throw NumericalError("harmonic fit normal equations are singular");
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  HarmonicFit fit;
  fit.amplitude = std::hypot(a, b);
  fit.phase = fit.amplitude == 0.0 ? 0.0 : wrap_phase(std::atan2(b, a));
  return fit;
}

SampleWindow measurement_window(const ResponseRecord& record, const IntegrationConfig& cfg) {
  const std::size_t n = record.size();
  if (n < 2) throw InvalidInput("response record is empty");
  const auto spp = static_cast<std::size_t>(record.steps_per_period);
  const auto periods = static_cast<std::size_t>(std::min(cfg.measure_periods, record.periods));
  const std::size_t end = n - 1;
  return {end - periods * spp, end};
}

ResponseMetrics response_metrics(const ResponseRecord& record, double omega,
                                 const IntegrationConfig& cfg) {
  const SampleWindow window = measurement_window(record, cfg);
  ResponseMetrics m;
  m.steady = record.steady;
  m.cycles_used = static_cast<int>(window.size() / static_cast<std::size_t>(record.steps_per_period));
  for (const auto& flap : record.flaps) {
    const std::span<const double> rot(flap.rotation);
    const auto fit = harmonic_fit(rot, record.dt, omega, window);
    m.flaps.push_back({rms(rot.subspan(window.begin, window.size())), fit.amplitude, fit.phase});
  }
  return m;
}

PowerBalance power_balance(const ResponseRecord& record, const SystemMatrices& system,
                           const ForcingSpec& forcing, const IntegrationConfig& cfg) {
  require_matching(system, forcing);
  if (record.flaps.size() != forcing.flaps.size()) {
    throw InvalidInput("response record and forcing disagree on the number of flaps");
  }
  const SampleWindow window = measurement_window(record, cfg);
  const int dof = system.dof();
  PowerBalance pb;
  DofVector v(dof);
  for (std::size_t s = window.begin; s < window.end; ++s) {
    const double t = record.time(s);
    for (int i = 0; i < dof; ++i) {
      const auto& f = forcing.flaps[static_cast<std::size_t>(i)];
      v(i) = record.flaps[static_cast<std::size_t>(i)].rate[s];
      if (!f.fixed) pb.input += f.amplitude * std::sin(forcing.omega * t + f.phase) * v(i);
    }
    pb.dissipated += v.dot(system.damping * v);
  }
  const auto count = static_cast<double>(window.size());
  pb.input /= count;
  pb.dissipated /= count;
  return pb;
}

void write_timeseries_csv(std::ostream& out, const ResponseRecord& record) {
  static constexpr const char* kTheta[] = {"theta_l", "theta_r"};
  static constexpr const char* kRate[] = {"omega_l", "omega_r"};
  const std::size_t dof = record.flaps.size();
  out << "# units: t [s], theta [rad], omega [rad/s]\n";
  out << "t";
  for (std::size_t i = 0; i < dof; ++i) out << ',' << kTheta[i];
  for (std::size_t i = 0; i < dof; ++i) out << ',' << kRate[i];
  out << '\n';
  for (std::size_t s = 0; s < record.size(); ++s) {
    out << fmt::format("{:.10g}", record.time(s));
    for (const auto& f : record.flaps) out << fmt::format(",{:.10g}", f.rotation[s]);
    for (const auto& f : record.flaps) out << fmt::format(",{:.10g}", f.rate[s]);
    out << '\n';
  }
}

}  // namespace oswec
