#include "oswec/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "csv_util.hpp"
#include "oswec/error.hpp"

namespace oswec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDispersionIterations = 100;
constexpr double kDispersionTolerance = 1e-10;

void require_period(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InvalidInput(fmt::format("wave period must be positive, got {}", period));
  }
}

void require_strictly_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw InvalidInput(fmt::format("{} grid is empty", name));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw InvalidInput(fmt::format("{} grid is not strictly increasing at index {}", name, i));
    }
  }
}

// Index of the lower bracketing node and the weight of the upper one.
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double x) {
  if (grid.size() == 1 || x <= grid.front()) return {0, 0.0};
  if (x >= grid.back()) return {grid.size() - 1, 0.0};
  const auto upper = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(upper - grid.begin()) - 1;
  return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

HydroCoefficients lerp(const HydroCoefficients& a, const HydroCoefficients& b, double w) {
  if (w == 0.0) return a;
  const auto mix = [w](double x, double y) { return x + w * (y - x); };
  return {mix(a.added_inertia, b.added_inertia), mix(a.damping, b.damping),
          mix(a.coupling_inertia, b.coupling_inertia),
          mix(a.coupling_damping, b.coupling_damping)};
}

}  // namespace

void Environment::validate() const {
  if (!(gravity > 0.0)) throw InvalidInput(fmt::format("gravity must be positive, got {}", gravity));
  if (water_depth && !(*water_depth > 0.0)) {
    throw InvalidInput(fmt::format("water depth must be positive, got {}", *water_depth));
  }
}

void FlapProperties::validate() const {
  if (!(inertia_dry > 0.0)) {
    throw InvalidInput(fmt::format("flap inertia must be positive, got {}", inertia_dry));
  }
  if (!(stiffness > 0.0)) {
    throw InvalidInput(fmt::format("flap stiffness must be positive, got {}", stiffness));
  }
}

void HydroCoefficients::validate() const {
  if (!(added_inertia >= 0.0)) {
    throw InvalidInput(fmt::format("added inertia must be non-negative, got {}", added_inertia));
  }
  if (!(damping > 0.0)) throw InvalidInput(fmt::format("damping must be positive, got {}", damping));
  if (!std::isfinite(coupling_inertia) || !std::isfinite(coupling_damping)) {
    throw InvalidInput("coupling coefficients must be finite");
  }
}

HydroCoefficients HydroCoefficients::isolated() const {
  return {added_inertia, damping, 0.0, 0.0};
}

void KernelParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidInput(fmt::format("kernel gain alpha must lie in [0, 1], got {}", alpha));
  }
  if (!(epsilon > 0.0)) {
    throw InvalidInput(fmt::format("kernel epsilon must be positive, got {}", epsilon));
  }
}

CoefficientTable::CoefficientTable(std::vector<double> periods, std::vector<double> distances,
                                   std::vector<HydroCoefficients> cells)
    : periods_(std::move(periods)), distances_(std::move(distances)), cells_(std::move(cells)) {
  require_strictly_increasing(periods_, "period");
  require_strictly_increasing(distances_, "distance");
  if (cells_.size() != periods_.size() * distances_.size()) {
    throw InvalidInput(fmt::format("coefficient table has {} cells, expected {}", cells_.size(),
                                   periods_.size() * distances_.size()));
  }
  for (const auto& c : cells_) c.validate();
}

const HydroCoefficients& CoefficientTable::cell(std::size_t period_index,
                                                std::size_t distance_index) const {
  return cells_.at(period_index * distances_.size() + distance_index);
}

double wavelength_deep(double period, const Environment& env) {
  require_period(period);
  env.validate();
  return env.gravity * period * period / kTwoPi;
}

double wavelength(double period, const Environment& env) {
  if (env.deep()) return wavelength_deep(period, env);
  return kTwoPi / solve_dispersion(period, env);
}

double solve_dispersion(double period, const Environment& env) {
  const double deep_length = wavelength_deep(period, env);
  const double k_deep = kTwoPi / deep_length;
  if (env.deep()) return k_deep;

  const double h = *env.water_depth;
  const double g = env.gravity;
  const double omega = kTwoPi / period;
  const double omega2 = omega * omega;
  const auto residual = [&](double k) { return g * k * std::tanh(k * h) - omega2; };

  // The root lies in [k_deep, k_deep / tanh(k_deep h)] since tanh is increasing.
  double lo = k_deep;
  double hi = k_deep / std::tanh(k_deep * h);
  double k = k_deep;
  for (int iter = 0; iter < kMaxDispersionIterations; ++iter) {
    const double f = residual(k);
    if (std::abs(f) / omega2 < 1e-14) return k;
    if (f < 0.0) lo = k; else hi = k;
    const double t = std::tanh(k * h);
    const double slope = g * (t + k * h * (1.0 - t * t));
    double next = k - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == k) break;
    k = next;
  }
  const double rel = std::abs(residual(k)) / omega2;
  if (rel < kDispersionTolerance) return k;
  throw NumericalError(fmt::format(
      "dispersion solve did not converge for T = {} s, h = {} m (relative residual {:.3e})",
      period, h, rel));
}

HydroCoefficients coefficients_at(const CoefficientTable& table, double period, double distance) {
  if (table.empty()) throw InvalidInput("coefficient table is empty");
  const auto [i, wp] = locate(table.periods(), period);
  const auto [j, wd] = locate(table.distances(), distance);
  const std::size_t i1 = wp > 0.0 ? i + 1 : i;
  const std::size_t j1 = wd > 0.0 ? j + 1 : j;
  const auto lower = lerp(table.cell(i, j), table.cell(i, j1), wd);
  const auto upper = lerp(table.cell(i1, j), table.cell(i1, j1), wd);
  return lerp(lower, upper, wp);
}

HydroCoefficients analytic_coupling(const HydroCoefficients& base, double distance,
                                    double wavenumber, const KernelParams& params) {
  params.validate();
  if (!(distance > 0.0)) throw InvalidInput(fmt::format("distance must be positive, got {}", distance));
  if (!(wavenumber > 0.0)) {
    throw InvalidInput(fmt::format("wavenumber must be positive, got {}", wavenumber));
  }
  HydroCoefficients out = base;
  if (params.alpha == 0.0) {
    out.coupling_damping = 0.0;
    out.coupling_inertia = 0.0;
    return out;
  }
  const double kd = wavenumber * distance;
  const double envelope = params.alpha / std::sqrt(std::max(kd, params.epsilon));
  out.coupling_damping = -envelope * base.damping * std::cos(kd);
  out.coupling_inertia = -envelope * base.added_inertia * std::sin(kd);
  return out;
}

CoefficientTable parse_coefficient_table(std::istream& in) {
  const auto lines = csv::read_lines(in);
  if (lines.empty()) throw ParseError("coefficient table: file is empty");
  const std::vector<std::string> expected{"period_s", "distance_m", "Ia", "C", "Ia_lr", "C_lr"};
  if (csv::split(lines.front().text) != expected) {
    throw ParseError(fmt::format(
        "coefficient table line {}: expected header period_s,distance_m,Ia,C,Ia_lr,C_lr",
        lines.front().number));
  }

  std::map<std::pair<double, double>, HydroCoefficients> cells;
  std::set<double> periods;
  std::set<double> distances;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& line = lines[r];
    const auto fields = csv::split(line.text);
    if (fields.size() != expected.size()) {
      throw ParseError(fmt::format("coefficient table line {}: expected {} fields, got {}",
                                   line.number, expected.size(), fields.size()));
    }
    double v[6];
    for (std::size_t c = 0; c < 6; ++c) {
      v[c] = csv::to_double(fields[c], fmt::format("coefficient table line {} column {}",
                                                   line.number, expected[c]));
    }
    if (!cells.emplace(std::pair{v[0], v[1]}, HydroCoefficients{v[2], v[3], v[4], v[5]}).second) {
      throw ParseError(fmt::format("coefficient table line {}: duplicate cell (T = {}, d = {})",
                                   line.number, v[0], v[1]));
    }
    periods.insert(v[0]);
    distances.insert(v[1]);
  }
  if (cells.empty()) throw ParseError("coefficient table: no data rows");

  std::vector<HydroCoefficients> grid;
  grid.reserve(periods.size() * distances.size());
  for (double t : periods) {
    for (double d : distances) {
      const auto it = cells.find({t, d});
      if (it == cells.end()) {
        throw ParseError(fmt::format("coefficient table: missing cell (T = {}, d = {})", t, d));
      }
      grid.push_back(it->second);
    }
  }
  try {
    return CoefficientTable({periods.begin(), periods.end()}, {distances.begin(), distances.end()},
                            std::move(grid));
  } catch (const InvalidInput& e) {
    throw ParseError(fmt::format("coefficient table: {}", e.what()));
  }
}

CoefficientTable load_coefficient_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open coefficient table '{}'", path.string()));
  try {
    return parse_coefficient_table(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace oswec
