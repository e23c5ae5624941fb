#include "oswec/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "oswec/error.hpp"
#include "oswec/parallel.hpp"

namespace oswec {

namespace {

void require_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw InvalidInput(fmt::format("JPD {} axis is empty", name));
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] > 0.0) || !std::isfinite(axis[i])) {
      throw InvalidInput(fmt::format("JPD {} bin {} must be positive, got {}", name, i, axis[i]));
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw InvalidInput(fmt::format("JPD {} axis is not strictly increasing at bin {}", name, i));
    }
  }
}

std::vector<std::string> flap_labels(int dof) {
  if (dof == 1) return {"single"};
  return {"front", "back"};
}

}  // namespace

MeanPower mean_power(const ResponseRecord& record, const PTOModel& pto, const IntegrationConfig& cfg) {
  if (!(pto.damping >= 0.0)) throw InvalidInput("PTO damping must be non-negative");
  const SampleWindow window = measurement_window(record, cfg);
  MeanPower out;
  out.steady = record.steady;
  for (const auto& flap : record.flaps) {
    double sum = 0.0;
    for (std::size_t s = window.begin; s < window.end; ++s) sum += flap.rate[s] * flap.rate[s];
    const double p = pto.damping * sum / static_cast<double>(window.size());
    out.per_flap.push_back(p);
    out.total += p;
  }
  return out;
}

double JPD::total() const {
  double sum = 0.0;
  for (double p : occurrence) sum += p;
  return sum;
}

void JPD::validate() const {
  require_axis(hs, "Hs");
  require_axis(te, "Te");
  if (occurrence.size() != hs.size() * te.size()) {
    throw InvalidInput(fmt::format("JPD has {} cells, expected {}", occurrence.size(), hs.size() * te.size()));
  }
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = 0; j < te.size(); ++j) {
      const double p = at(i, j);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InvalidInput(fmt::format("JPD cell (Hs = {} m, Te = {} s) has invalid occurrence {}",
                                       hs[i], te[j], p));
      }
    }
  }
  if (total() > 1.0 + 1e-9) {
    throw InvalidInput(fmt::format("JPD occurrences sum to {}, more than 1", total()));
  }
}

JPD parse_jpd(std::istream& in) {
  const auto lines = csv::read_lines(in);
  if (lines.empty()) throw ParseError("JPD: file is empty");

  JPD jpd;
  const auto header = csv::split(lines.front().text);
  if (header.size() < 2 || header.front().rfind("hs_m", 0) != 0) {
    throw ParseError(fmt::format("JPD line {}: expected header 'hs_m\\te_s,<Te bins...>'",
                                 lines.front().number));
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    jpd.te.push_back(csv::to_double(header[c], fmt::format("JPD line {} column {}", lines.front().number, c + 1)));
  }

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& line = lines[r];
    const auto fields = csv::split(line.text);
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("JPD line {}: ragged row with {} fields, expected {}", line.number,
                                   fields.size(), header.size()));
    }
    const double hs = csv::to_double(fields[0], fmt::format("JPD line {} column 1", line.number));
    jpd.hs.push_back(hs);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto where = fmt::format("JPD line {} column {} (Hs = {} m, Te = {} s)", line.number, c + 1,
                                     hs, jpd.te[c - 1]);
      const double p = csv::to_double(fields[c], where);
      if (p < 0.0) throw ParseError(fmt::format("{}: negative occurrence {}", where, p));
      jpd.occurrence.push_back(p);
    }
  }
  if (jpd.hs.empty()) throw ParseError("JPD: no Hs rows");
  try {
    jpd.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ParseError(fmt::format("JPD: {}", e.what()));
  }
  return jpd;
}

JPD load_jpd(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open JPD file '{}'", path.string()));
  try {
    return parse_jpd(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok: return "ok";
    case CellStatus::Skipped: return "skipped";
    case CellStatus::Failed: return "failed";
  }
  return "unknown";
}

nlohmann::json Design::descriptor() const {
  nlohmann::json pto = {{"share_of_damping", model.pto.share_of_damping},
                        {"included_in_damping", model.pto.included_in_damping}};
  if (model.pto.fixed_damping) pto["damping_Nms_per_rad"] = *model.pto.fixed_damping;
  return {{"configuration", dof() == 1 ? "single" : "dual"},
          {"distance_m", distance},
          {"heading_deg", heading},
          {"coefficient_source", model.coefficient_label()},
          {"back_flap_eta", model.transfer.eta()},
          {"pto", pto}};
}

PowerMatrix compute_power_matrix(const Design& design, const JPD& bins,
                                 const PowerMatrixOptions& options) {
  design.model.validate();
  bins.validate();
  if (!(design.distance >= 0.0)) throw InvalidInput("separation distance must be non-negative");

  PowerMatrix pm;
  pm.hs = bins.hs;
  pm.te = bins.te;
  pm.dof = design.dof();
  pm.descriptor = design.descriptor();
  pm.cells.resize(bins.occurrence.size());

  parallel_for(pm.cells.size(), options.workers, [&](std::size_t idx) {
    const std::size_t i = idx / bins.te.size();
    const std::size_t j = idx % bins.te.size();
    PowerCell& cell = pm.cells[idx];
    cell.power.assign(static_cast<std::size_t>(pm.dof), 0.0);
    if (options.skip_unoccupied && bins.occurrence[idx] == 0.0) {
      cell.status = CellStatus::Skipped;
      return;
    }
    try {
      const WaveCondition wave{bins.hs[i], bins.te[j], design.heading};
      const ForcingSpec forcing =
          pm.dof == 1 ? build_single_wave_forcing(wave, design.model.transfer, design.model.env)
                      : build_wave_forcing(wave, design.distance, design.model.transfer, design.model.env);
      const CaseResult r = simulate_case(design.model, forcing, wave.period, design.distance);
      cell.power = r.power;
      cell.total = r.total_power;
      cell.steady = r.metrics.steady;
      if (!cell.steady) cell.message = "did not reach steady state";
    } catch (const std::exception& e) {
      cell.status = CellStatus::Failed;
      cell.steady = false;
      cell.total = 0.0;
      cell.power.assign(static_cast<std::size_t>(pm.dof), 0.0);
      cell.message = e.what();
    }
  });
  return pm;
}

AEPReport annual_energy(const PowerMatrix& pm, const JPD& jpd, double hours_per_year) {
  if (pm.hs != jpd.hs || pm.te != jpd.te) {
    throw InvalidInput("power matrix and JPD bin axes do not match");
  }
  if (!(hours_per_year > 0.0)) throw InvalidInput("hours per year must be positive");
  AEPReport r;
  r.hs = pm.hs;
  r.te = pm.te;
  r.descriptor = pm.descriptor;
  r.energy_wh.resize(pm.cells.size(), 0.0);
  double total_wh = 0.0;
  for (std::size_t idx = 0; idx < pm.cells.size(); ++idx) {
    const PowerCell& cell = pm.cells[idx];
    const double p = jpd.occurrence[idx];
    if (p > 0.0 && cell.status != CellStatus::Ok) ++r.failed_cells;
    if (p > 0.0 && cell.status == CellStatus::Ok && !cell.steady) ++r.unsteady_cells;
    r.energy_wh[idx] = cell.status == CellStatus::Ok ? cell.total * p * hours_per_year : 0.0;
    total_wh += r.energy_wh[idx];
  }
  r.total_gwh = total_wh * 1e-9;
  return r;
}

void write_power_matrix_csv(std::ostream& out, const PowerMatrix& pm, const AEPReport& aep) {
  const auto labels = flap_labels(pm.dof);
  out << "# power matrix: hs_m [m], te_s [s], power_*_W [W mean mechanical], energy_Wh [Wh/yr]; "
      << fmt::format("total {:.10g} GWh/yr\n", aep.total_gwh);
  out << "hs_m,te_s";
  for (const auto& l : labels) out << ",power_" << l << "_W";
  out << ",power_total_W,energy_Wh,steady,status\n";
  for (std::size_t i = 0; i < pm.hs.size(); ++i) {
    for (std::size_t j = 0; j < pm.te.size(); ++j) {
      const std::size_t idx = i * pm.te.size() + j;
      const PowerCell& c = pm.cells[idx];
      out << fmt::format("{:.10g},{:.10g}", pm.hs[i], pm.te[j]);
      for (double p : c.power) out << fmt::format(",{:.10g}", p);
      out << fmt::format(",{:.10g},{:.10g},{},{}\n", c.total, aep.energy_wh[idx], c.steady ? 1 : 0,
                         to_string(c.status));
    }
  }
}

nlohmann::json to_json(const PowerMatrix& pm, const AEPReport& aep) {
  const auto labels = flap_labels(pm.dof);
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < pm.hs.size(); ++i) {
    for (std::size_t j = 0; j < pm.te.size(); ++j) {
      const std::size_t idx = i * pm.te.size() + j;
      const PowerCell& c = pm.cells[idx];
      nlohmann::json power = nlohmann::json::object();
      for (std::size_t f = 0; f < labels.size(); ++f) power[labels[f]] = c.power[f];
      nlohmann::json cell = {{"hs_m", pm.hs[i]},      {"te_s", pm.te[j]},
                             {"power_W", power},       {"power_total_W", c.total},
                             {"energy_Wh", aep.energy_wh[idx]}, {"steady", c.steady},
                             {"status", to_string(c.status)}};
      if (!c.message.empty()) cell["message"] = c.message;
      cells.push_back(std::move(cell));
    }
  }
  return {{"configuration", pm.descriptor},
          {"hs_m", pm.hs},
          {"te_s", pm.te},
          {"cells", std::move(cells)},
          {"total_GWh", aep.total_gwh},
          {"failed_cells", aep.failed_cells},
          {"unsteady_cells", aep.unsteady_cells}};
}

double AEPTable::spread() const {
  std::vector<double> dual;
  for (const auto& r : rows) {
    if (r.distance > 0.0) dual.push_back(r.total_gwh);
  }
  if (dual.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(dual.begin(), dual.end());
  double mean = 0.0;
  for (double x : dual) mean += x / static_cast<double>(dual.size());
  return mean > 0.0 ? (*hi - *lo) / mean : 0.0;
}

AEPTable run_aep_table(const ModelConfig& model, const JPD& jpd, const std::vector<double>& distances,
                       double heading, const PowerMatrixOptions& options) {
  if (distances.empty()) throw InvalidInput("AEP table needs at least one distance");
  for (double d : distances) {
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput(fmt::format("AEP distance must be positive, got {}", d));
  }
  jpd.validate();
  AEPTable table;
  table.heading = heading;

  std::vector<double> all{0.0};
  all.insert(all.end(), distances.begin(), distances.end());
  for (double d : all) {
    AEPRow row;
    row.label = d > 0.0 ? "dual" : "single x2";
    row.distance = d;
    row.matrix = compute_power_matrix({d, heading, model}, jpd, options);
    row.report = annual_energy(row.matrix, jpd);
    row.total_gwh = d > 0.0 ? row.report.total_gwh : 2.0 * row.report.total_gwh;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_aep_table_csv(std::ostream& out, const AEPTable& table) {
  out << "# annual mechanical energy: distance_m [m], aep_GWh [GWh/yr], ratio_to_baseline [-] "
         "relative to twice the single flap; "
      << fmt::format("heading {:.10g} deg, spread (max-min)/mean {:.6g}\n", table.heading, table.spread());
  out << "configuration,distance_m,aep_GWh,ratio_to_baseline,failed_cells,unsteady_cells\n";
  const double base = table.rows.empty() ? 0.0 : table.rows.front().total_gwh;
  for (const auto& r : table.rows) {
    const std::string ratio = base > 0.0 ? fmt::format("{:.10g}", r.total_gwh / base) : std::string();
    out << fmt::format("{},{:.10g},{:.10g},{},{},{}\n", r.label, r.distance, r.total_gwh, ratio,
                       r.report.failed_cells, r.report.unsteady_cells);
  }
}

nlohmann::json to_json(const AEPTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  const double base = table.rows.empty() ? 0.0 : table.rows.front().total_gwh;
  for (const auto& r : table.rows) {
    nlohmann::json row = {{"configuration", r.label},
                          {"distance_m", r.distance},
                          {"aep_GWh", r.total_gwh},
                          {"failed_cells", r.report.failed_cells},
                          {"unsteady_cells", r.report.unsteady_cells},
                          {"power_matrix", to_json(r.matrix, r.report)}};
    if (base > 0.0) row["ratio_to_baseline"] = r.total_gwh / base;
    rows.push_back(std::move(row));
  }
  return {{"heading_deg", table.heading}, {"spread", table.spread()}, {"rows", std::move(rows)}};
}

}  // namespace oswec
