#pragma once

// Everything needed to simulate one case: environment, flap, coefficient
// source, wave-to-torque transfer, PTO and integration settings.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "oswec/dynamics.hpp"
#include "oswec/forcing.hpp"
#include "oswec/hydro.hpp"

namespace oswec {

/// Distance-independent diagonal terms plus the analytic coupling kernel.
struct AnalyticCoefficients {
  HydroCoefficients base;
  KernelParams kernel;
};

using CoefficientSource = std::variant<CoefficientTable, AnalyticCoefficients>;

/// Linear rotational damper. When `included_in_damping` is set the PTO is
/// part of the system damping C; otherwise it is added to the diagonal.
struct PTOModel {
  double damping = 0.0;  // C_pto, N m s/rad
  bool included_in_damping = true;
};

/// How C_pto is derived from the coefficients at each (period, distance).
struct PtoSettings {
  double share_of_damping = 0.5;
  std::optional<double> fixed_damping;  // overrides the share when set
  bool included_in_damping = true;

  void validate() const;
  PTOModel resolve(const HydroCoefficients& coeffs) const;
};

struct ModelConfig {
  Environment env;
  FlapProperties flap;
  CoefficientSource coefficients = AnalyticCoefficients{};
  ExcitationTransfer transfer;
  PtoSettings pto;
  IntegrationConfig integration;

  void validate() const;
  std::string coefficient_label() const;
};

/// Coefficients at (period, distance). distance == 0 denotes an isolated
/// flap. Table-backed isolated flaps use the diagonal at the largest tabulated
/// distance.
HydroCoefficients coefficients_for(const ModelConfig& model, double period, double distance);

/// System matrices with the PTO folded in when it is not already part of C.
SystemMatrices system_for(const ModelConfig& model, const HydroCoefficients& coeffs,
                          const PTOModel& pto, int dof);

struct CaseResult {
  ResponseMetrics metrics;
  std::vector<double> power;  // W per flap
  double total_power = 0.0;   // W
  PowerBalance balance;
  double pto_damping = 0.0;
  std::optional<ResponseRecord> record;
};

/// Integrates one forcing case. dof follows the forcing; distance is
/// ignored for one flap.
CaseResult simulate_case(const ModelConfig& model, const ForcingSpec& forcing, double period,
                         double distance, bool keep_record = false);

/// Metrics, power and balance keyed by flap label ("single", "left", ...).
nlohmann::json to_json(const CaseResult& result, const std::vector<std::string>& labels);

/// Calibrated reference configuration shipped with the project.
ModelConfig reference_model();

}  // namespace oswec
