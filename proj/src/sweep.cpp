#include "oswec/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <tuple>

#include <fmt/format.h>

#include "oswec/error.hpp"
#include "oswec/parallel.hpp"

namespace oswec {

namespace {

// Outcome of one simulated case, or the error that stopped it.
struct Outcome {
  std::optional<CaseResult> result;
  std::string error;
};

Outcome run_guarded(const std::function<CaseResult()>& fn) {
  Outcome o;
  try {
    o.result = fn();
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

void require_nonempty_positive(const std::vector<double>& xs, const char* name, bool allow_zero = false) {
  if (xs.empty()) throw InvalidInput(fmt::format("sweep axis '{}' is empty", name));
  for (double x : xs) {
    if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0)) {
      throw InvalidInput(fmt::format("sweep axis '{}' has invalid value {}", name, x));
    }
  }
}

// Fills the measured part of a row from a case outcome and its baseline.
void fill_row(SweepRow& row, const Outcome& dual, const Outcome& single) {
  if (!single.result) {
    row.status = "failed";
    row.message = "single baseline: " + single.error;
  } else {
    row.single = single.result->metrics.flaps.front();
    row.single_power = single.result->total_power;
  }
  if (!dual.result) {
    row.status = "failed";
    row.message = dual.error;
    return;
  }
  const CaseResult& r = *dual.result;
  row.flaps = r.metrics.flaps;
  row.power = r.power;
  row.total_power = r.total_power;
  row.steady = r.metrics.steady;
  row.balance_error = r.balance.relative_error();
  if (!row.steady && row.status == "ok") {
    row.status = "unsteady";
    row.message = "did not reach steady state";
  }
  if (single.result) {
    for (const auto& f : row.flaps) {
      row.rms_ratio.push_back(row.single.rms_rotation > 0.0 ? f.rms_rotation / row.single.rms_rotation
                                                            : std::nan(""));
    }
  }
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  return fmt::format("{:.10g}", x);
}

std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

nlohmann::json row_json(const SweepRow& row, const std::vector<std::string>& labels) {
  nlohmann::json flaps = nlohmann::json::object();
  for (std::size_t f = 0; f < row.flaps.size(); ++f) {
    const auto& m = row.flaps[f];
    nlohmann::json e = {{"rms_rad", m.rms_rotation},
                        {"amplitude_rad", m.amplitude},
                        {"phase_rad", m.phase},
                        {"power_W", row.power.at(f)}};
    if (f < row.rms_ratio.size() && !std::isnan(row.rms_ratio[f])) e["rms_ratio"] = row.rms_ratio[f];
    flaps[row.flaps.size() == 1 ? std::string("single") : labels.at(f)] = std::move(e);
  }
  nlohmann::json j = {{"d_over_lambda", row.d_over_lambda},
                      {"band", to_string(row.band)},
                      {"flaps", std::move(flaps)},
                      {"total_power_W", row.total_power},
                      {"steady", row.steady},
                      {"balance_error", row.balance_error},
                      {"single", {{"rms_rad", row.single.rms_rotation},
                                  {"amplitude_rad", row.single.amplitude},
                                  {"phase_rad", row.single.phase},
                                  {"power_W", row.single_power}}},
                      {"status", row.status}};
  if (row.loss) j["loss"] = *row.loss;
  if (!row.message.empty()) j["message"] = row.message;
  return j;
}

struct Axis {
  const char* key;
  std::function<nlohmann::json(const SweepRow&)> value;
};

// Groups consecutive rows by the leading axis, recursively.
nlohmann::json nest(const std::vector<const SweepRow*>& rows, const std::vector<Axis>& axes,
                    std::size_t level, const std::vector<std::string>& labels) {
  if (level == axes.size()) return row_json(*rows.front(), labels);
  nlohmann::json out = nlohmann::json::array();
  std::size_t begin = 0;
  while (begin < rows.size()) {
    const nlohmann::json key = axes[level].value(*rows[begin]);
    std::size_t end = begin + 1;
    while (end < rows.size() && axes[level].value(*rows[end]) == key) ++end;
    const std::vector<const SweepRow*> group(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                             rows.begin() + static_cast<std::ptrdiff_t>(end));
    const char* child = level + 1 < axes.size() ? "values" : "result";
    out.push_back({{axes[level].key, key}, {child, nest(group, axes, level + 1, labels)}});
    begin = end;
  }
  return out;
}

}  // namespace

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Torque: return "torque";
    case StudyKind::Wave: return "wave";
    case StudyKind::Heading: return "heading";
  }
  return "unknown";
}

std::optional<StudyKind> parse_study(std::string_view name) {
  for (auto k : {StudyKind::Torque, StudyKind::Wave, StudyKind::Heading}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(SpacingBand band) {
  switch (band) {
    case SpacingBand::Short: return "0.06-0.11";
    case SpacingBand::Long: return "0.25-0.80";
    case SpacingBand::Other: return "other";
  }
  return "other";
}

SpacingBand classify_spacing(double d_over_lambda) {
  const double r = std::round(d_over_lambda * 100.0) / 100.0;
  if (r >= 0.06 && r <= 0.11) return SpacingBand::Short;
  if (r >= 0.25 && r <= 0.80) return SpacingBand::Long;
  return SpacingBand::Other;
}

void SweepPlan::validate(StudyKind study) const {
  switch (study) {
    case StudyKind::Torque:
      require_nonempty_positive(distances, "distances");
      require_nonempty_positive(torque_periods, "periods");
      require_nonempty_positive(torque_amplitudes, "amplitudes");
      if (scenarios.empty()) throw InvalidInput("sweep has no scenarios");
      break;
    case StudyKind::Wave:
      require_nonempty_positive(distances, "distances");
      require_nonempty_positive(wave_periods, "periods");
      require_nonempty_positive(wave_heights, "heights");
      break;
    case StudyKind::Heading:
      require_nonempty_positive(headings, "headings", true);
      for (double h : headings) {
        if (h >= 90.0) throw InvalidInput(fmt::format("heading {} is not below 90 degrees", h));
      }
      if (!(heading_distance > 0.0 && heading_period > 0.0 && heading_height > 0.0)) {
        throw InvalidInput("heading study distance, period and height must be positive");
      }
      break;
  }
}

SweepReport run_torque_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers) {
  plan.validate(StudyKind::Torque);
  model.validate();

  using Key = std::pair<double, double>;  // (Te, T0)
  std::map<Key, Outcome> baselines;
  for (double te : plan.torque_periods) {
    for (double t0 : plan.torque_amplitudes) baselines.emplace(Key{te, t0}, Outcome{});
  }
  std::vector<std::map<Key, Outcome>::iterator> slots;
  for (auto it = baselines.begin(); it != baselines.end(); ++it) slots.push_back(it);
  parallel_for(slots.size(), workers, [&](std::size_t i) {
    const auto [te, t0] = slots[i]->first;
    slots[i]->second = run_guarded([&, te = te, t0 = t0] {
      const TorqueScenario s{ScenarioKind::SingleBaseline, t0, te, 0.0};
      return simulate_case(model, build_torque_scenario(s, model.env), te, 0.0);
    });
  });

  SweepReport report;
  report.study = StudyKind::Torque;
  report.flap_labels = {"left", "right"};
  for (ScenarioKind kind : plan.scenarios) {
    const bool single = kind == ScenarioKind::SingleBaseline;
    const std::vector<double> distances = single ? std::vector<double>{0.0} : plan.distances;
    for (double d : distances) {
      for (double te : plan.torque_periods) {
        for (double t0 : plan.torque_amplitudes) {
          SweepRow row;
          row.scenario = std::string(to_string(kind));
          row.distance = d;
          row.period = te;
          row.amplitude = t0;
          row.d_over_lambda = d / wavelength(te, model.env);
          row.band = single ? SpacingBand::Other : classify_spacing(row.d_over_lambda);
          report.rows.push_back(std::move(row));
        }
      }
    }
  }

  std::vector<Outcome> outcomes(report.rows.size());
  parallel_for(report.rows.size(), workers, [&](std::size_t i) {
    const SweepRow& row = report.rows[i];
    const ScenarioKind kind = *parse_scenario(row.scenario);
    if (kind == ScenarioKind::SingleBaseline) {
      outcomes[i] = baselines.at({row.period, row.amplitude});
      return;
    }
    outcomes[i] = run_guarded([&] {
      const TorqueScenario s{kind, row.amplitude, row.period, row.distance};
      return simulate_case(model, build_torque_scenario(s, model.env), row.period, row.distance);
    });
  });
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto& row = report.rows[i];
    fill_row(row, outcomes[i], baselines.at({row.period, row.amplitude}));
  }
  return report;
}

SweepReport run_wave_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers) {
  plan.validate(StudyKind::Wave);
  model.validate();

  using Key = std::pair<double, double>;  // (Te, H)
  std::map<Key, Outcome> baselines;
  for (double te : plan.wave_periods) {
    for (double h : plan.wave_heights) baselines.emplace(Key{te, h}, Outcome{});
  }
  std::vector<std::map<Key, Outcome>::iterator> slots;
  for (auto it = baselines.begin(); it != baselines.end(); ++it) slots.push_back(it);
  parallel_for(slots.size(), workers, [&](std::size_t i) {
    const auto [te, h] = slots[i]->first;
    slots[i]->second = run_guarded([&, te = te, h = h] {
      const WaveCondition w{h, te, 0.0};
      return simulate_case(model, build_single_wave_forcing(w, model.transfer, model.env), te, 0.0);
    });
  });

  SweepReport report;
  report.study = StudyKind::Wave;
  report.flap_labels = {"front", "back"};
  for (double d : plan.distances) {
    for (double te : plan.wave_periods) {
      for (double h : plan.wave_heights) {
        SweepRow row;
        row.scenario = "wave";
        row.distance = d;
        row.period = te;
        row.amplitude = h;
        row.d_over_lambda = d / wavelength(te, model.env);
        row.band = classify_spacing(row.d_over_lambda);
        report.rows.push_back(std::move(row));
      }
    }
  }

  std::vector<Outcome> outcomes(report.rows.size());
  parallel_for(report.rows.size(), workers, [&](std::size_t i) {
    const SweepRow& row = report.rows[i];
    outcomes[i] = run_guarded([&] {
      const WaveCondition w{row.amplitude, row.period, 0.0};
      return simulate_case(model, build_wave_forcing(w, row.distance, model.transfer, model.env),
                           row.period, row.distance);
    });
  });
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto& row = report.rows[i];
    fill_row(row, outcomes[i], baselines.at({row.period, row.amplitude}));
  }
  return report;
}

SweepReport run_heading_study(const SweepPlan& plan, const ModelConfig& model, unsigned workers) {
  plan.validate(StudyKind::Heading);
  model.validate();

  const double d = plan.heading_distance;
  const double te = plan.heading_period;
  const double h = plan.heading_height;

  // Headings plus the normal-incidence reference for the loss column.
  std::vector<double> headings = plan.headings;
  const bool has_zero = std::find(headings.begin(), headings.end(), 0.0) != headings.end();
  if (!has_zero) headings.push_back(0.0);

  std::vector<Outcome> dual(headings.size());
  std::vector<Outcome> single(headings.size());
  parallel_for(2 * headings.size(), workers, [&](std::size_t job) {
    const std::size_t i = job / 2;
    const WaveCondition w{h, te, headings[i]};
    if (job % 2 == 0) {
      dual[i] = run_guarded([&] {
        return simulate_case(model, build_wave_forcing(w, d, model.transfer, model.env), te, d);
      });
    } else {
      single[i] = run_guarded([&] {
        return simulate_case(model, build_single_wave_forcing(w, model.transfer, model.env), te, 0.0);
      });
    }
  });

  const auto zero = static_cast<std::size_t>(
      std::find(headings.begin(), headings.end(), 0.0) - headings.begin());
  const double reference = dual[zero].result ? dual[zero].result->total_power : 0.0;

  SweepReport report;
  report.study = StudyKind::Heading;
  report.flap_labels = {"front", "back"};
  for (std::size_t i = 0; i < plan.headings.size(); ++i) {
    SweepRow row;
    row.scenario = "heading";
    row.distance = d;
    row.period = te;
    row.amplitude = h;
    row.heading = plan.headings[i];
    row.d_over_lambda = d / wavelength(te, model.env);
    row.band = classify_spacing(row.d_over_lambda);
    fill_row(row, dual[i], single[i]);
    if (dual[i].result && reference > 0.0) {
      row.loss = 1.0 - dual[i].result->total_power / reference;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(std::ostream& out, const SweepReport& report) {
  const bool torque = report.study == StudyKind::Torque;
  const char* amplitude_col = torque ? "T0_Nm" : "height_m";
  out << fmt::format(
      "# {} study: distance_m [m], period_s [s], {} [{}], heading_deg [deg], d_over_lambda [-], "
      "*_rad [rad], *_W [W mean mechanical], *_rms_ratio [-] = flap RMS / single-flap RMS, "
      "loss [-] = 1 - P(heading) / P(0), balance_error [-]\n",
      to_string(report.study), amplitude_col, torque ? "N m" : "m");
  out << "scenario,distance_m,period_s," << amplitude_col << ",heading_deg,d_over_lambda,band";
  for (const auto& l : report.flap_labels) {
    out << fmt::format(",{0}_rms_rad,{0}_amplitude_rad,{0}_phase_rad,{0}_power_W,{0}_rms_ratio", l);
  }
  out << ",total_power_W,single_rms_rad,single_amplitude_rad,single_phase_rad,single_power_W,loss,"
         "steady,balance_error,status,message\n";

  for (const auto& row : report.rows) {
    out << fmt::format("{},{},{},{},{},{},{}", row.scenario, csv_number(row.distance),
                       csv_number(row.period), csv_number(row.amplitude), csv_number(row.heading),
                       csv_number(row.d_over_lambda), to_string(row.band));
    for (std::size_t f = 0; f < report.flap_labels.size(); ++f) {
      if (f < row.flaps.size()) {
        const auto& m = row.flaps[f];
        const double ratio = f < row.rms_ratio.size() ? row.rms_ratio[f] : std::nan("");
        out << fmt::format(",{},{},{},{},{}", csv_number(m.rms_rotation), csv_number(m.amplitude),
                           csv_number(m.phase), csv_number(row.power[f]), csv_number(ratio));
      } else {
        out << ",,,,,";
      }
    }
    out << fmt::format(",{},{},{},{},{},{},{},{},{},{}\n", csv_number(row.total_power),
                       csv_number(row.single.rms_rotation), csv_number(row.single.amplitude),
                       csv_number(row.single.phase), csv_number(row.single_power),
                       row.loss ? csv_number(*row.loss) : std::string(), row.steady ? 1 : 0,
                       csv_number(row.balance_error), row.status, csv_text(row.message));
  }
}

nlohmann::json to_json(const SweepReport& report) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : report.rows) rows.push_back(&r);

  const Axis scenario{"scenario", [](const SweepRow& r) { return nlohmann::json(r.scenario); }};
  const Axis distance{"distance_m", [](const SweepRow& r) { return nlohmann::json(r.distance); }};
  const Axis period{"period_s", [](const SweepRow& r) { return nlohmann::json(r.period); }};
  const Axis torque{"T0_Nm", [](const SweepRow& r) { return nlohmann::json(r.amplitude); }};
  const Axis height{"height_m", [](const SweepRow& r) { return nlohmann::json(r.amplitude); }};
  const Axis heading{"heading_deg", [](const SweepRow& r) { return nlohmann::json(r.heading); }};

  std::vector<Axis> axes;
  switch (report.study) {
    case StudyKind::Torque: axes = {scenario, distance, period, torque}; break;
    case StudyKind::Wave: axes = {distance, period, height}; break;
    case StudyKind::Heading: axes = {heading}; break;
  }
  nlohmann::json j = {{"study", to_string(report.study)},
                      {"flap_labels", report.flap_labels},
                      {"rows", report.rows.size()},
                      {"grid", rows.empty() ? nlohmann::json::array() : nest(rows, axes, 0, report.flap_labels)}};
  if (report.study == StudyKind::Heading && !report.rows.empty()) {
    const auto& r = report.rows.front();
    j["distance_m"] = r.distance;
    j["period_s"] = r.period;
    j["height_m"] = r.amplitude;
  }
  return j;
}

}  // namespace oswec
