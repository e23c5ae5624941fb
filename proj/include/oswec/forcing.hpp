#pragma once

// Forcing builders for the torque-driven cases and for regular waves.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oswec/dynamics.hpp"
#include "oswec/hydro.hpp"

namespace oswec {

enum class ScenarioKind {
  SingleBaseline,
  RightOnlyLeftFixed,
  RightOnlyLeftFree,
  InPhase,
  OutOfPhase,
  ArbitraryPhase,
};

/// Command-line spelling, e.g. "in-phase".
std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view name);
const std::vector<ScenarioKind>& all_scenarios();

/// Index 0 is the left flap, index 1 the right flap.
struct TorqueScenario {
  ScenarioKind kind = ScenarioKind::SingleBaseline;
  double amplitude = 0.0;  // T0, N m
  double period = 0.0;     // Te, s
  double distance = 0.0;   // d, m (unused for SingleBaseline)

  void validate() const;
};

struct WaveCondition {
  double height = 0.0;   // H, crest to trough, m
  double period = 0.0;   // Te, s
  double heading = 0.0;  // beta, degrees; 0 is normal incidence

  void validate() const;
};

/// Wave-to-torque map: Gamma(T) in N m per metre of wave amplitude, plus the
/// back-flap transmission tau(d) = 1 - eta exp(-d / lambda) for d > 0 and
/// tau(0) = 1.
class ExcitationTransfer {
 public:
  ExcitationTransfer() = default;
  ExcitationTransfer(std::vector<double> periods, std::vector<double> gamma, double eta = 0.1);

  /// Single-node table: Gamma independent of period.
  static ExcitationTransfer constant(double gamma, double eta = 0.1);

  const std::vector<double>& periods() const { return periods_; }
  const std::vector<double>& gamma() const { return gamma_; }
  double eta() const { return eta_; }
  bool empty() const { return periods_.empty(); }

  double transmission(double distance, double wavelength) const;

 private:
  std::vector<double> periods_;
  std::vector<double> gamma_;
  double eta_ = 0.1;
};

/// Torque forcing for one of the six cases. The right flap of ArbitraryPhase
/// lags by 2 pi d / lambda(Te).
ForcingSpec build_torque_scenario(const TorqueScenario& scenario, const Environment& env);

/// Index 0 is the front flap. Amplitudes scale with cos(beta); the back flap
/// is attenuated by tau(d) and lags by k d cos(beta). d == 0 gives two
/// coincident flaps.
ForcingSpec build_wave_forcing(const WaveCondition& wave, double distance,
                               const ExcitationTransfer& xfer, const Environment& env);

/// One-flap wave forcing (the isolated baseline).
ForcingSpec build_single_wave_forcing(const WaveCondition& wave, const ExcitationTransfer& xfer,
                                      const Environment& env);

/// Gamma(T) by linear interpolation, clamped at the ends of the grid.
double transfer_at(const ExcitationTransfer& xfer, double period);

/// CSV `period_s,gamma_Nm_per_m`.
ExcitationTransfer parse_transfer_table(std::istream& in, double eta);
ExcitationTransfer load_transfer_table(const std::filesystem::path& path, double eta);

}  // namespace oswec
