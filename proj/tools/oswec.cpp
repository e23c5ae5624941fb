// oswec: command-line front end for single runs, sweeps, AEP tables and the
// built-in oracle suite.
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical error,
// 3 verification failure.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "oswec/config.hpp"
#include "oswec/energy.hpp"
#include "oswec/error.hpp"
#include "oswec/parallel.hpp"
#include "oswec/sweep.hpp"
#include "oswec/verify.hpp"

namespace fs = std::filesystem;
using namespace oswec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerify = 3;

struct Common {
  std::string config;
  std::string out;
  unsigned workers = default_workers();
};

RunConfig load(const Common& c) {
  return c.config.empty() ? reference_run_config() : load_run_config(c.config);
}

fs::path output_dir(const Common& c, const RunConfig& rc) {
  const fs::path dir = c.out.empty() ? rc.output_dir : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  return dir;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(fmt::format("cannot write '{}'", path.string()));
  fn(out);
  if (!out) throw InvalidInput(fmt::format("error writing '{}'", path.string()));
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

// "10,45,70" -> {10, 45, 70}. An empty string gives an empty list.
std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidInput(fmt::format("{}: '{}' is not a number", flag, item));
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

std::string flap_summary(const std::vector<std::string>& labels, const CaseResult& r) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += fmt::format("{}rms {} {:.4g} rad", i ? ", " : "", labels[i], r.metrics.flaps[i].rms_rotation);
  }
  return s;
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  bool wave = false;
  double d = 0.0;
  double te = 0.0;
  double t0 = 0.0;
  double h = 0.0;
  double beta = 0.0;
  bool timeseries = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  const RunConfig rc = load(c);
  const ModelConfig& m = rc.model;

  ForcingSpec forcing;
  std::vector<std::string> labels;
  nlohmann::json inputs;
  std::string title;
  if (a.wave) {
    const WaveCondition w{a.h, a.te, a.beta};
    forcing = a.d > 0.0 ? build_wave_forcing(w, a.d, m.transfer, m.env)
                        : build_single_wave_forcing(w, m.transfer, m.env);
    labels = a.d > 0.0 ? std::vector<std::string>{"front", "back"} : std::vector<std::string>{"single"};
    inputs = {{"mode", "wave"}, {"height_m", a.h}, {"period_s", a.te}, {"heading_deg", a.beta},
              {"distance_m", a.d}};
    title = fmt::format("wave H={} m Te={} s beta={} deg d={} m", a.h, a.te, a.beta, a.d);
  } else {
    const auto kind = parse_scenario(a.scenario);
    if (!kind) throw InvalidInput(fmt::format("unknown scenario '{}'", a.scenario));
    if (*kind != ScenarioKind::SingleBaseline && !(a.d > 0.0)) {
      throw InvalidInput("--d must be positive for two-flap scenarios");
    }
    forcing = build_torque_scenario({*kind, a.t0, a.te, a.d}, m.env);
    labels = *kind == ScenarioKind::SingleBaseline ? std::vector<std::string>{"single"}
                                                   : std::vector<std::string>{"left", "right"};
    inputs = {{"mode", "torque"}, {"scenario", a.scenario}, {"T0_Nm", a.t0}, {"period_s", a.te},
              {"distance_m", a.d}};
    title = fmt::format("{} T0={} N m Te={} s d={} m", a.scenario, a.t0, a.te, a.d);
  }
  for (std::size_t i = 0; i < forcing.flaps.size(); ++i) {
    inputs["forcing"][labels[i]] = {{"amplitude_Nm", forcing.flaps[i].amplitude},
                                    {"phase_rad", forcing.flaps[i].phase},
                                    {"fixed", forcing.flaps[i].fixed}};
  }

  const CaseResult r = simulate_case(m, forcing, a.te, a.d, a.timeseries);
  const fs::path dir = output_dir(c, rc);
  nlohmann::json j = to_json(r, labels);
  j["inputs"] = inputs;
  j["coefficient_source"] = m.coefficient_label();
  write_json(dir / "simulate.json", j);
  if (a.timeseries) {
    write_file(dir / "timeseries.csv", [&](std::ostream& out) { write_timeseries_csv(out, *r.record); });
  }
  fmt::print("{}: {}; power {:.4g} W{}\n", title, flap_summary(labels, r), r.total_power,
             r.metrics.steady ? "" : " (not steady)");
  return kExitOk;
}

// sweep -------------------------------------------------------------------

struct SweepArgs {
  std::string study = "torque";
  std::optional<std::string> distances, periods, amplitudes, heights, headings, scenarios;
  std::optional<double> heading_distance, heading_period, heading_height;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  const auto study = parse_study(a.study);
  if (!study) throw InvalidInput(fmt::format("unknown study '{}'", a.study));
  const RunConfig rc = load(c);

  SweepPlan plan;
  if (a.distances) plan.distances = parse_list(*a.distances, "--distances");
  if (a.periods) {
    (*study == StudyKind::Torque ? plan.torque_periods : plan.wave_periods) = parse_list(*a.periods, "--periods");
  }
  if (a.amplitudes) plan.torque_amplitudes = parse_list(*a.amplitudes, "--amplitudes");
  if (a.heights) plan.wave_heights = parse_list(*a.heights, "--heights");
  if (a.headings) plan.headings = parse_list(*a.headings, "--headings");
  if (a.scenarios) {
    plan.scenarios.clear();
    std::string rest = *a.scenarios;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string name = rest.substr(0, comma);
      const auto kind = parse_scenario(name);
      if (!kind) throw InvalidInput(fmt::format("unknown scenario '{}'", name));
      plan.scenarios.push_back(*kind);
      rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    }
  }
  if (a.heading_distance) plan.heading_distance = *a.heading_distance;
  if (a.heading_period) plan.heading_period = *a.heading_period;
  if (a.heading_height) plan.heading_height = *a.heading_height;

  SweepReport report;
  switch (*study) {
    case StudyKind::Torque: report = run_torque_study(plan, rc.model, c.workers); break;
    case StudyKind::Wave: report = run_wave_study(plan, rc.model, c.workers); break;
    case StudyKind::Heading: report = run_heading_study(plan, rc.model, c.workers); break;
  }

  const fs::path dir = output_dir(c, rc);
  const std::string stem = fmt::format("sweep_{}", to_string(*study));
  write_file(dir / (stem + ".csv"), [&](std::ostream& out) { write_report_csv(out, report); });
  nlohmann::json j = to_json(report);
  j["coefficient_source"] = rc.model.coefficient_label();
  write_json(dir / (stem + ".json"), j);

  std::size_t failed = 0, unsteady = 0;
  for (const auto& row : report.rows) {
    failed += row.status == "failed";
    unsteady += row.status == "unsteady";
  }
  fmt::print("{} study: {} rows ({} failed, {} unsteady) -> {}\n", to_string(*study), report.rows.size(),
             failed, unsteady, (dir / (stem + ".csv")).string());
  return kExitOk;
}

// aep ---------------------------------------------------------------------

struct AepArgs {
  std::string jpd;
  std::string distances = "10,15,33,45,55,70,86";
  double heading = 0.0;
  bool all_cells = false;
};

int cmd_aep(const Common& c, const AepArgs& a) {
  const RunConfig rc = load(c);
  const JPD jpd = load_jpd(a.jpd);
  const auto distances = parse_list(a.distances, "--distances");
  const AEPTable table = run_aep_table(rc.model, jpd, distances, a.heading, {c.workers, !a.all_cells});

  const fs::path dir = output_dir(c, rc);
  write_file(dir / "aep.csv", [&](std::ostream& out) { write_aep_table_csv(out, table); });
  nlohmann::json j = to_json(table);
  j["jpd_total_occurrence"] = jpd.total();
  j["coefficient_source"] = rc.model.coefficient_label();
  write_json(dir / "aep.json", j);
  for (const auto& row : table.rows) {
    const std::string name = row.distance > 0.0 ? fmt::format("power_matrix_d{:g}.csv", row.distance)
                                                : std::string("power_matrix_single.csv");
    write_file(dir / name, [&](std::ostream& out) { write_power_matrix_csv(out, row.matrix, row.report); });
  }

  fmt::print("{:<10} {:>10} {:>10}\n", "config", "d [m]", "AEP [GWh]");
  for (const auto& row : table.rows) {
    fmt::print("{:<10} {:>10g} {:>10.4f}{}\n", row.label, row.distance, row.total_gwh,
               row.report.failed_cells + row.report.unsteady_cells > 0 ? "  (incomplete cells)" : "");
  }
  fmt::print("spread across distances: {:.2f}%\n", 100.0 * table.spread());
  return kExitOk;
}

// verify ------------------------------------------------------------------

struct VerifyArgs {
  int cases = 20;
  std::uint64_t seed = 20240611;
  bool flip_sign = false;
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  VerifyOptions opt;
  if (!c.config.empty()) opt.integration = load_run_config(c.config).model.integration;
  if (a.cases < 1) throw InvalidInput("--cases must be at least 1");
  opt.cases = a.cases;
  opt.seed = a.seed;
  opt.workers = c.workers;
  opt.flip_dissipation_sign = a.flip_sign;

  const VerifyReport report = run_oracle_suite(opt);
  for (const auto& cr : report.cases) {
    for (const auto& p : cr.properties) {
      fmt::print("case {:>3} ({}-DOF) {:<15} {}  {}\n", cr.index, cr.input.system.dof(), p.name,
                 p.passed ? "PASS" : "FAIL", p.detail);
    }
  }
  int failed = 0;
  for (const auto& cr : report.cases) {
    if (cr.passed()) continue;
    ++failed;
    std::cerr << fmt::format("case {} failed; parameters:\n{}\n", cr.index, cr.input.describe().dump(2));
  }
  fmt::print("{} of {} cases passed (seed {})\n", report.cases.size() - static_cast<std::size_t>(failed),
             report.cases.size(), a.seed);
  return failed == 0 ? kExitOk : kExitVerify;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "Run configuration (JSON); the built-in reference if omitted")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (default: output_dir from the config)");
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single- and dual-flap OSWEC simulator"};
  app.require_subcommand(1);

  Common common;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one torque or regular-wave case");
  add_common(simulate, common);
  simulate->add_option("--scenario", sim.scenario,
                       "single | right-only-left-fixed | right-only-left-free | in-phase | out-of-phase | "
                       "arbitrary-phase");
  simulate->add_flag("--wave", sim.wave, "Regular-wave forcing instead of a torque scenario");
  simulate->add_option("--d", sim.d, "Separation distance [m]; 0 with --wave is a single flap");
  simulate->add_option("--Te", sim.te, "Period [s]")->required();
  simulate->add_option("--T0", sim.t0, "Torque amplitude [N m]");
  simulate->add_option("--H", sim.h, "Wave height, crest to trough [m]");
  simulate->add_option("--beta", sim.beta, "Wave heading [deg]");
  simulate->add_flag("--timeseries", sim.timeseries, "Also write timeseries.csv");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run a torque, wave or heading study");
  add_common(sweep, common);
  sweep->add_option("--study", sw.study, "torque | wave | heading");
  sweep->add_option("--distances", sw.distances, "Comma-separated distances [m]");
  sweep->add_option("--periods", sw.periods, "Comma-separated periods [s]");
  sweep->add_option("--amplitudes", sw.amplitudes, "Comma-separated torque amplitudes [N m]");
  sweep->add_option("--heights", sw.heights, "Comma-separated wave heights [m]");
  sweep->add_option("--headings", sw.headings, "Comma-separated headings [deg]");
  sweep->add_option("--scenarios", sw.scenarios, "Comma-separated scenario names");
  sweep->add_option("--heading-distance", sw.heading_distance, "Heading study distance [m]");
  sweep->add_option("--heading-period", sw.heading_period, "Heading study period [s]");
  sweep->add_option("--heading-height", sw.heading_height, "Heading study wave height [m]");

  AepArgs ae;
  auto* aep = app.add_subcommand("aep", "Power matrices and annual energy per distance");
  add_common(aep, common);
  aep->add_option("--jpd", ae.jpd, "Wave resource JPD (CSV)")->required();
  aep->add_option("--distances", ae.distances, "Comma-separated distances [m]");
  aep->add_option("--beta", ae.heading, "Wave heading [deg]");
  aep->add_flag("--all-cells", ae.all_cells, "Also simulate cells with zero occurrence");

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify", "Run the built-in oracle suite");
  add_common(verify, common);
  verify->add_option("--cases", ve.cases, "Number of random systems");
  verify->add_option("--seed", ve.seed, "Random seed");
  verify->add_flag("--inject-damping-sign-flip", ve.flip_sign,
                   "Test hook: evaluate dissipation with the damping sign flipped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (simulate->parsed()) {
    if (!sim.wave && sim.scenario.empty()) {
      std::cerr << "error: simulate needs --scenario or --wave\n";
      return kExitInput;
    }
    return guarded([&] { return cmd_simulate(common, sim); });
  }
  if (sweep->parsed()) return guarded([&] { return cmd_sweep(common, sw); });
  if (aep->parsed()) return guarded([&] { return cmd_aep(common, ae); });
  return guarded([&] { return cmd_verify(common, ve); });
}
