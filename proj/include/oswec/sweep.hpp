#pragma once

// Experiment grids: torque-scenario studies, distance sweeps under regular
// waves and heading sweeps, each compared against the single-flap baseline.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oswec/dynamics.hpp"
#include "oswec/forcing.hpp"
#include "oswec/model.hpp"

namespace oswec {

enum class StudyKind { Torque, Wave, Heading };
std::string_view to_string(StudyKind kind);
std::optional<StudyKind> parse_study(std::string_view name);

struct SweepPlan {
  std::vector<double> distances{10, 15, 33, 45, 55, 70, 86};           // m
  std::vector<double> torque_periods{7.5, 8.5, 9.5, 10.5};             // s
  std::vector<double> wave_periods{7.5, 8.0, 8.5, 9.0, 9.5, 10.0, 10.5, 11.0, 11.5};  // s
  std::vector<double> torque_amplitudes{0.6e6, 0.8e6, 1.0e6, 1.2e6};   // N m
  std::vector<double> wave_heights{1.75, 3.25};                        // m
  std::vector<double> headings{0, 5, 10, 15, 20, 25, 30, 35, 40, 45};  // degrees
  std::vector<ScenarioKind> scenarios{ScenarioKind::RightOnlyLeftFixed, ScenarioKind::RightOnlyLeftFree,
                                      ScenarioKind::InPhase, ScenarioKind::OutOfPhase,
                                      ScenarioKind::ArbitraryPhase};
  double heading_distance = 45.0;  // m
  double heading_period = 8.5;     // s
  double heading_height = 1.75;    // m

  void validate(StudyKind study) const;
};

/// Regime of d / lambda after rounding to two decimals.
enum class SpacingBand { Short, Long, Other };
std::string_view to_string(SpacingBand band);
SpacingBand classify_spacing(double d_over_lambda);

struct SweepRow {
  std::string scenario;     // torque: scenario name; wave: "wave"; heading: "heading"
  double distance = 0.0;    // m (0 for the single baseline)
  double period = 0.0;      // s
  double amplitude = 0.0;   // T0 in N m (torque) or H in m (wave, heading)
  double heading = 0.0;     // degrees
  double d_over_lambda = 0.0;
  SpacingBand band = SpacingBand::Other;

  std::vector<FlapMetrics> flaps;  // 1 or 2 entries
  std::vector<double> power;       // W per flap
  double total_power = 0.0;
  bool steady = false;
  double balance_error = 0.0;  // relative input/dissipation mismatch

  FlapMetrics single;
  double single_power = 0.0;
  std::vector<double> rms_ratio;  // flap RMS / single RMS
  std::optional<double> loss;     // heading study: 1 - P(beta) / P(0)

  std::string status = "ok";
  std::string message;
};

struct SweepReport {
  StudyKind study = StudyKind::Torque;
  std::vector<std::string> flap_labels;  // {left, right} or {front, back}
  std::vector<SweepRow> rows;
};

/// Every (scenario, d, Te, T0) point in lexicographic order. A single
/// baseline is computed once per (Te, T0).
SweepReport run_torque_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers = 1);

/// Every (d, Te, H) point with the front/back distinction.
SweepReport run_wave_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers = 1);

/// Every heading at the plan's heading distance, period and height.
SweepReport run_heading_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers = 1);

void write_report_csv(std::ostream& out, const SweepReport& report);
nlohmann::json to_json(const SweepReport& report);

}  // namespace oswec
