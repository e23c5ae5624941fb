#pragma once

// Single- and dual-flap equations of motion:
//
//   (diag(I) + I_a_matrix) theta'' + C_matrix theta' + k theta = T0 sin(w t + phi)
//
// solved either by fixed-step RK4 to steady state or directly in the
// frequency domain.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "oswec/hydro.hpp"

namespace oswec {

inline constexpr int kMaxDof = 2;

using DofMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
using DofVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;

struct SystemMatrices {
  DofMatrix inertia;    // kg m^2, includes added inertia
  DofMatrix damping;    // N m s/rad
  DofVector stiffness;  // N m/rad, one restoring term per flap

  int dof() const { return static_cast<int>(stiffness.size()); }
};

struct FlapForcing {
  double amplitude = 0.0;  // T0, N m
  double phase = 0.0;      // rad
  bool fixed = false;      // rotation held at zero for the whole run
};

/// Harmonic torque T0 sin(omega t + phi) on each flap.
struct ForcingSpec {
  double omega = 0.0;  // rad/s
  std::vector<FlapForcing> flaps;

  double period() const;
  void validate() const;
};

struct IntegrationConfig {
  int steps_per_period = 200;
  int ramp_periods = 10;
  int measure_periods = 10;
  int max_periods = 200;
  double convergence_tol = 1e-4;  // relative change of per-cycle RMS

  void validate() const;
};

struct FlapSeries {
  std::vector<double> rotation;  // theta, rad
  std::vector<double> rate;      // theta', rad/s
};

/// Uniformly sampled trajectory, t_i = i * dt, starting from rest.
struct ResponseRecord {
  double dt = 0.0;
  double omega = 0.0;
  int steps_per_period = 0;
  int periods = 0;  // full forcing periods integrated
  bool steady = false;
  std::vector<FlapSeries> flaps;

  std::size_t size() const { return flaps.empty() ? 0 : flaps.front().rotation.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

struct HarmonicFit {
  double amplitude = 0.0;
  double phase = 0.0;  // rad, in (-pi, pi]
};

struct FlapMetrics {
  double rms_rotation = 0.0;  // rad
  double amplitude = 0.0;     // rad
  double phase = 0.0;         // rad, in (-pi, pi]
};

struct ResponseMetrics {
  std::vector<FlapMetrics> flaps;
  bool steady = false;
  int cycles_used = 0;
};

/// Half-open sample index range [begin, end).
struct SampleWindow {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

/// Mean input and dissipated power over a sample window, both in W.
struct PowerBalance {
  double input = 0.0;
  double dissipated = 0.0;

  double relative_error() const;
};

/// Builds the matrices of the one- or two-flap system. For dof == 1 the
/// coupling terms are ignored.
SystemMatrices assemble_system(const FlapProperties& props, const HydroCoefficients& coeffs, int dof);

/// Fixed-step RK4 from rest until the per-cycle RMS settles or max_periods
/// is reached (then steady == false). Fixed flaps are eliminated.
ResponseRecord integrate(const SystemMatrices& system, const ForcingSpec& forcing,
                         const IntegrationConfig& cfg);

/// Complex rotation amplitude per flap, theta(t) = Im(Theta e^{i w t}).
/// Fixed flaps are eliminated and report 0.
std::vector<std::complex<double>> freq_domain_solve(const SystemMatrices& system,
                                                    const ForcingSpec& forcing);

/// Least-squares fit of A sin(w t) + B cos(w t) over `window`, with t_i = i dt.
HarmonicFit harmonic_fit(std::span<const double> series, double dt, double omega,
                         SampleWindow window);

/// The last `cfg.measure_periods` whole periods of the record.
SampleWindow measurement_window(const ResponseRecord& record, const IntegrationConfig& cfg);

ResponseMetrics response_metrics(const ResponseRecord& record, double omega,
                                 const IntegrationConfig& cfg);

/// Input power sum_i <T_i(t) theta_i'> against dissipation <theta'^T C theta'>.
PowerBalance power_balance(const ResponseRecord& record, const SystemMatrices& system,
                           const ForcingSpec& forcing, const IntegrationConfig& cfg);

/// CSV `t,theta_l,theta_r,omega_l,omega_r` (right columns absent for one flap).
void write_timeseries_csv(std::ostream& out, const ResponseRecord& record);

}  // namespace oswec
