#include "oswec/forcing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "oswec/error.hpp"

namespace oswec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 6> kScenarioNames{{
    {ScenarioKind::SingleBaseline, "single"},
    {ScenarioKind::RightOnlyLeftFixed, "right-only-left-fixed"},
    {ScenarioKind::RightOnlyLeftFree, "right-only-left-free"},
    {ScenarioKind::InPhase, "in-phase"},
    {ScenarioKind::OutOfPhase, "out-of-phase"},
    {ScenarioKind::ArbitraryPhase, "arbitrary-phase"},
}};

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kScenarioNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
  for (const auto& [k, n] : kScenarioNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<ScenarioKind>& all_scenarios() {
  static const std::vector<ScenarioKind> kinds{
      ScenarioKind::SingleBaseline, ScenarioKind::RightOnlyLeftFixed, ScenarioKind::RightOnlyLeftFree,
      ScenarioKind::InPhase,        ScenarioKind::OutOfPhase,         ScenarioKind::ArbitraryPhase};
  return kinds;
}

void TorqueScenario::validate() const {
  if (!(amplitude > 0.0)) throw InvalidInput(fmt::format("torque amplitude must be positive, got {}", amplitude));
  if (!(period > 0.0)) throw InvalidInput(fmt::format("excitation period must be positive, got {}", period));
  if (kind != ScenarioKind::SingleBaseline && !(distance >= 0.0)) {
    throw InvalidInput(fmt::format("separation distance must be non-negative, got {}", distance));
  }
}

void WaveCondition::validate() const {
  if (!(height > 0.0)) throw InvalidInput(fmt::format("wave height must be positive, got {}", height));
  if (!(period > 0.0)) throw InvalidInput(fmt::format("wave period must be positive, got {}", period));
  if (!(heading >= 0.0 && heading < 90.0)) {
    throw InvalidInput(fmt::format(
        "heading must lie in [0, 90) degrees, got {} (a 90 degree heading produces no energy)",
        heading));
  }
}

ExcitationTransfer::ExcitationTransfer(std::vector<double> periods, std::vector<double> gamma,
                                       double eta)
    : periods_(std::move(periods)), gamma_(std::move(gamma)), eta_(eta) {
  if (periods_.size() != gamma_.size()) throw InvalidInput("transfer table columns differ in length");
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (!(periods_[i] > 0.0)) throw InvalidInput("transfer table periods must be positive");
    if (i > 0 && !(periods_[i] > periods_[i - 1])) {
      throw InvalidInput("transfer table periods must be strictly increasing");
    }
    if (!(gamma_[i] > 0.0)) {
      throw InvalidInput(fmt::format("transfer gamma must be positive, got {} at T = {} s", gamma_[i],
                                     periods_[i]));
    }
  }
  if (!(eta_ >= 0.0 && eta_ < 1.0)) {
    throw InvalidInput(fmt::format("back-flap attenuation eta must lie in [0, 1), got {}", eta_));
  }
}

ExcitationTransfer ExcitationTransfer::constant(double gamma, double eta) {
  return ExcitationTransfer({1.0}, {gamma}, eta);
}

double ExcitationTransfer::transmission(double distance, double wavelength) const {
  if (distance == 0.0) return 1.0;  // coincident flaps see the same wave
  return 1.0 - eta_ * std::exp(-distance / wavelength);
}

double transfer_at(const ExcitationTransfer& xfer, double period) {
  if (xfer.empty()) throw InvalidInput("excitation transfer table is empty");
  const auto& ts = xfer.periods();
  const auto& gs = xfer.gamma();
  if (period <= ts.front()) return gs.front();
  if (period >= ts.back()) return gs.back();
  const auto i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), period) - ts.begin()) - 1;
  const double w = (period - ts[i]) / (ts[i + 1] - ts[i]);
  return gs[i] + w * (gs[i + 1] - gs[i]);
}

ForcingSpec build_torque_scenario(const TorqueScenario& s, const Environment& env) {
  s.validate();
  ForcingSpec f;
  f.omega = kTwoPi / s.period;
  const double t0 = s.amplitude;
  switch (s.kind) {
    case ScenarioKind::SingleBaseline:
      f.flaps = {{t0, 0.0, false}};
      break;
    case ScenarioKind::RightOnlyLeftFixed:
      f.flaps = {{0.0, 0.0, true}, {t0, 0.0, false}};
      break;
    case ScenarioKind::RightOnlyLeftFree:
      f.flaps = {{0.0, 0.0, false}, {t0, 0.0, false}};
      break;
    case ScenarioKind::InPhase:
      f.flaps = {{t0, 0.0, false}, {t0, 0.0, false}};
      break;
    case ScenarioKind::OutOfPhase:
      f.flaps = {{t0, 0.0, false}, {t0, std::numbers::pi, false}};
      break;
    case ScenarioKind::ArbitraryPhase:
      f.flaps = {{t0, 0.0, false},
                 {t0, kTwoPi * s.distance / wavelength(s.period, env), false}};
      break;
  }
  return f;
}

ForcingSpec build_wave_forcing(const WaveCondition& wave, double distance,
                               const ExcitationTransfer& xfer, const Environment& env) {
  wave.validate();
  if (!(distance >= 0.0)) {
    throw InvalidInput(fmt::format("separation distance must be non-negative, got {}", distance));
  }
  const double k = solve_dispersion(wave.period, env);
  const double cos_heading = std::cos(radians(wave.heading));
  const double front = transfer_at(xfer, wave.period) * 0.5 * wave.height * cos_heading;
  const double tau = xfer.transmission(distance, kTwoPi / k);

  ForcingSpec f;
  f.omega = kTwoPi / wave.period;
  f.flaps = {{front, 0.0, false}, {tau * front, -k * distance * cos_heading, false}};
  return f;
}

ForcingSpec build_single_wave_forcing(const WaveCondition& wave, const ExcitationTransfer& xfer,
                                      const Environment& env) {
  ForcingSpec f = build_wave_forcing(wave, 0.0, xfer, env);
  f.flaps.resize(1);
  return f;
}

ExcitationTransfer parse_transfer_table(std::istream& in, double eta) {
  const auto lines = csv::read_lines(in);
  if (lines.empty()) throw ParseError("transfer table: file is empty");
  if (csv::split(lines.front().text) != std::vector<std::string>{"period_s", "gamma_Nm_per_m"}) {
    throw ParseError(fmt::format("transfer table line {}: expected header period_s,gamma_Nm_per_m",
                                 lines.front().number));
  }
  std::vector<std::pair<double, double>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = csv::split(lines[r].text);
    if (fields.size() != 2) {
      throw ParseError(fmt::format("transfer table line {}: expected 2 fields, got {}",
                                   lines[r].number, fields.size()));
    }
    const auto where = fmt::format("transfer table line {}", lines[r].number);
    rows.emplace_back(csv::to_double(fields[0], where), csv::to_double(fields[1], where));
  }
  if (rows.empty()) throw ParseError("transfer table: no data rows");
  std::sort(rows.begin(), rows.end());
  std::vector<double> periods, gamma;
  for (const auto& [t, g] : rows) {
    periods.push_back(t);
    gamma.push_back(g);
  }
  try {
    return ExcitationTransfer(std::move(periods), std::move(gamma), eta);
  } catch (const InvalidInput& e) {
    throw ParseError(fmt::format("transfer table: {}", e.what()));
  }
}

ExcitationTransfer load_transfer_table(const std::filesystem::path& path, double eta) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open transfer table '{}'", path.string()));
  try {
    return parse_transfer_table(in, eta);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace oswec
