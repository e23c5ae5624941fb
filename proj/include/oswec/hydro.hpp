#pragma once

// Wave kinematics and hydrodynamic coefficient provisioning.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace oswec {

inline constexpr double kDefaultGravity = 9.81;

struct Environment {
  double gravity = kDefaultGravity;          // m/s^2
  std::optional<double> water_depth;         // m; empty means deep water

  bool deep() const { return !water_depth.has_value(); }
  void validate() const;
};

struct FlapProperties {
  double inertia_dry = 0.0;  // I, kg m^2
  double stiffness = 0.0;    // k, N m/rad

  void validate() const;
};

/// Radiation coefficients at one (period, distance). The coupling terms fill
/// both off-diagonal slots of the dual-flap system.
struct HydroCoefficients {
  double added_inertia = 0.0;     // I_a, kg m^2
  double damping = 0.0;           // C, N m s/rad
  double coupling_inertia = 0.0;  // I_a_lr, kg m^2
  double coupling_damping = 0.0;  // C_lr, N m s/rad

  void validate() const;
  /// Same diagonal terms, coupling zeroed (isolated flap).
  HydroCoefficients isolated() const;

  friend bool operator==(const HydroCoefficients&, const HydroCoefficients&) = default;
};

/// Coefficients on a rectangular (period, distance) grid.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  /// `cells` is period-major: cells[i * distances.size() + j].
  CoefficientTable(std::vector<double> periods, std::vector<double> distances,
                   std::vector<HydroCoefficients> cells);

  const std::vector<double>& periods() const { return periods_; }
  const std::vector<double>& distances() const { return distances_; }
  const HydroCoefficients& cell(std::size_t period_index, std::size_t distance_index) const;
  bool empty() const { return cells_.empty(); }

 private:
  std::vector<double> periods_;
  std::vector<double> distances_;
  std::vector<HydroCoefficients> cells_;
};

/// Parameters of the analytic coupling kernel.
struct KernelParams {
  double alpha = 0.05;   // gain in [0, 1]
  double epsilon = 0.1;  // floor on k*d inside the square root

  void validate() const;
};

/// Deep-water wavelength g T^2 / (2 pi).
double wavelength_deep(double period, const Environment& env);

/// Wavelength from the dispersion relation (deep or finite depth).
double wavelength(double period, const Environment& env);

/// Wavenumber k with omega^2 = g k tanh(k h). Newton iteration seeded with the
/// deep-water root and safeguarded by a bracket.
double solve_dispersion(double period, const Environment& env);

/// Bilinear interpolation in (period, distance), clamped to the grid.
HydroCoefficients coefficients_at(const CoefficientTable& table, double period, double distance);

/// Replaces the coupling terms of `base` with a decaying oscillatory kernel:
///   C_lr   = -alpha C   cos(kd) / sqrt(max(kd, eps))
///   I_a_lr = -alpha I_a sin(kd) / sqrt(max(kd, eps))
/// Negative coupling damping at small kd lowers the net damping of the
/// in-phase mode.
HydroCoefficients analytic_coupling(const HydroCoefficients& base, double distance,
                                    double wavenumber, const KernelParams& params);

/// CSV with header `period_s,distance_m,Ia,C,Ia_lr,C_lr`.
CoefficientTable parse_coefficient_table(std::istream& in);
CoefficientTable load_coefficient_table(const std::filesystem::path& path);

}  // namespace oswec
