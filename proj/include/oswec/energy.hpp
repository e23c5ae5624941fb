#pragma once

// Mean mechanical power, power matrices over (Hs, Te) bins and annual energy.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oswec/dynamics.hpp"
#include "oswec/model.hpp"

namespace oswec {

inline constexpr double kHoursPerYear = 8766.0;

struct MeanPower {
  std::vector<double> per_flap;  // W
  double total = 0.0;            // W
  bool steady = false;           // false flags a cell that never settled
};

/// P = C_pto <theta'^2> per flap over the measurement window.
MeanPower mean_power(const ResponseRecord& record, const PTOModel& pto, const IntegrationConfig& cfg);

/// Occurrence fraction per (Hs, Te) bin; row-major in Hs. May sum below 1.
struct JPD {
  std::vector<double> hs;  // m
  std::vector<double> te;  // s
  std::vector<double> occurrence;

  double at(std::size_t i, std::size_t j) const { return occurrence.at(i * te.size() + j); }
  double total() const;
  void validate() const;
};

/// CSV: header `hs_m\te_s,<te...>`, then one row per Hs with fractions.
JPD parse_jpd(std::istream& in);
JPD load_jpd(const std::filesystem::path& path);

enum class CellStatus { Ok, Skipped, Failed };
std::string_view to_string(CellStatus status);

struct PowerCell {
  std::vector<double> power;  // W per flap
  double total = 0.0;         // W
  bool steady = true;
  CellStatus status = CellStatus::Ok;
  std::string message;
};

/// One device configuration to evaluate. distance == 0 is the single flap.
struct Design {
  double distance = 0.0;  // m
  double heading = 0.0;   // degrees
  ModelConfig model;

  int dof() const { return distance > 0.0 ? 2 : 1; }
  nlohmann::json descriptor() const;
};

struct PowerMatrix {
  std::vector<double> hs;
  std::vector<double> te;
  std::vector<PowerCell> cells;  // row-major in Hs
  int dof = 1;
  nlohmann::json descriptor;

  const PowerCell& at(std::size_t i, std::size_t j) const { return cells.at(i * te.size() + j); }
};

struct PowerMatrixOptions {
  unsigned workers = 1;
  /// Cells with zero occurrence are not simulated (partial power matrix).
  bool skip_unoccupied = true;
};

/// Cells are independent; results do not depend on the worker count.
PowerMatrix compute_power_matrix(const Design& design, const JPD& bins,
                                 const PowerMatrixOptions& options = {});

struct AEPReport {
  std::vector<double> hs;
  std::vector<double> te;
  std::vector<double> energy_wh;  // per cell, row-major in Hs
  double total_gwh = 0.0;
  int failed_cells = 0;    // occupied cells without a power value
  int unsteady_cells = 0;  // occupied cells that never settled
  nlohmann::json descriptor;
};

/// AEP = sum P(cell) p(cell) hours_per_year. Axes must match exactly.
AEPReport annual_energy(const PowerMatrix& pm, const JPD& jpd, double hours_per_year = kHoursPerYear);

void write_power_matrix_csv(std::ostream& out, const PowerMatrix& pm, const AEPReport& aep);
nlohmann::json to_json(const PowerMatrix& pm, const AEPReport& aep);

struct AEPRow {
  std::string label;      // "single x2" or "dual"
  double distance = 0.0;  // m, 0 for the baseline
  PowerMatrix matrix;
  AEPReport report;
  double total_gwh = 0.0;  // doubled for the baseline row
};

/// One row per distance after a doubled single-flap baseline row.
struct AEPTable {
  double heading = 0.0;
  std::vector<AEPRow> rows;

  /// (max - min) / mean of the dual rows.
  double spread() const;
};

AEPTable run_aep_table(const ModelConfig& model, const JPD& jpd, const std::vector<double>& distances,
                       double heading = 0.0, const PowerMatrixOptions& options = {});

void write_aep_table_csv(std::ostream& out, const AEPTable& table);
nlohmann::json to_json(const AEPTable& table);

}  // namespace oswec
