#include "oswec/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include <fmt/format.h>

#include "oswec/error.hpp"

namespace oswec {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InvalidInput(fmt::format("config: '{}' must be an object", where));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidInput(fmt::format("config: unknown key '{}' in '{}'", key, where));
  }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InvalidInput(fmt::format("config: '{}.{}' must be a number", where, key));
  return v.get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidInput(fmt::format("config: missing '{}.{}'", where, key));
  return number(obj, key, where, 0.0);
}

int count(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw InvalidInput(fmt::format("config: '{}.{}' must be an integer", where, key));
  return v.get<int>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const json& v, const std::string& where) {
  if (!v.is_string()) throw InvalidInput(fmt::format("config: '{}' must be a path string", where));
  std::filesystem::path p = v.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j, "<root>", {"environment", "flap", "coefficients", "excitation", "pto",
                               "integration", "output_dir", "seed"});
  RunConfig rc;
  ModelConfig& m = rc.model;

  if (j.contains("environment")) {
    const auto& e = j.at("environment");
    reject_unknown(e, "environment", {"gravity_m_per_s2", "water_depth_m"});
    m.env.gravity = number(e, "gravity_m_per_s2", "environment", kDefaultGravity);
    if (e.contains("water_depth_m")) {
      const auto& depth = e.at("water_depth_m");
      if (depth.is_string() && depth.get<std::string>() == "deep") {
        m.env.water_depth.reset();
      } else if (depth.is_number()) {
        m.env.water_depth = depth.get<double>();
      } else {
        throw InvalidInput("config: 'environment.water_depth_m' must be a number or \"deep\"");
      }
    }
  }

  if (!j.contains("flap")) throw InvalidInput("config: missing 'flap'");
  const auto& flap = j.at("flap");
  reject_unknown(flap, "flap", {"inertia_dry_kg_m2", "stiffness_Nm_per_rad"});
  m.flap.inertia_dry = required_number(flap, "inertia_dry_kg_m2", "flap");
  m.flap.stiffness = required_number(flap, "stiffness_Nm_per_rad", "flap");

  if (!j.contains("coefficients")) throw InvalidInput("config: missing 'coefficients'");
  const auto& coeffs = j.at("coefficients");
  reject_unknown(coeffs, "coefficients", {"analytic", "table_file"});
  if (coeffs.contains("analytic") == coeffs.contains("table_file")) {
    throw InvalidInput("config: 'coefficients' needs exactly one of 'analytic' or 'table_file'");
  }
  if (coeffs.contains("table_file")) {
    m.coefficients = load_coefficient_table(resolve(base_dir, coeffs.at("table_file"), "coefficients.table_file"));
  } else {
    const auto& a = coeffs.at("analytic");
    const std::string where = "coefficients.analytic";
    reject_unknown(a, where, {"added_inertia_kg_m2", "damping_Nms_per_rad", "alpha", "epsilon"});
    AnalyticCoefficients ac;
    ac.base.added_inertia = required_number(a, "added_inertia_kg_m2", where);
    ac.base.damping = required_number(a, "damping_Nms_per_rad", where);
    ac.kernel.alpha = number(a, "alpha", where, ac.kernel.alpha);
    ac.kernel.epsilon = number(a, "epsilon", where, ac.kernel.epsilon);
    m.coefficients = ac;
  }

  if (!j.contains("excitation")) throw InvalidInput("config: missing 'excitation'");
  const auto& ex = j.at("excitation");
  reject_unknown(ex, "excitation", {"transfer_file", "gamma_Nm_per_m", "back_flap_eta"});
  const double eta = number(ex, "back_flap_eta", "excitation", 0.1);
  if (ex.contains("transfer_file") == ex.contains("gamma_Nm_per_m")) {
    throw InvalidInput("config: 'excitation' needs exactly one of 'transfer_file' or 'gamma_Nm_per_m'");
  }
  if (ex.contains("transfer_file")) {
    m.transfer = load_transfer_table(resolve(base_dir, ex.at("transfer_file"), "excitation.transfer_file"), eta);
  } else {
    m.transfer = ExcitationTransfer::constant(required_number(ex, "gamma_Nm_per_m", "excitation"), eta);
  }

  if (j.contains("pto")) {
    const auto& p = j.at("pto");
    reject_unknown(p, "pto", {"share_of_damping", "damping_Nms_per_rad", "included_in_damping"});
    if (p.contains("share_of_damping") && p.contains("damping_Nms_per_rad")) {
      throw InvalidInput("config: 'pto' takes 'share_of_damping' or 'damping_Nms_per_rad', not both");
    }
    m.pto.share_of_damping = number(p, "share_of_damping", "pto", m.pto.share_of_damping);
    if (p.contains("damping_Nms_per_rad")) m.pto.fixed_damping = number(p, "damping_Nms_per_rad", "pto", 0.0);
    if (p.contains("included_in_damping")) {
      if (!p.at("included_in_damping").is_boolean()) {
        throw InvalidInput("config: 'pto.included_in_damping' must be true or false");
      }
      m.pto.included_in_damping = p.at("included_in_damping").get<bool>();
    }
  }

  if (j.contains("integration")) {
    const auto& ic = j.at("integration");
    reject_unknown(ic, "integration", {"steps_per_period", "ramp_periods", "measure_periods",
                                       "max_periods", "convergence_tol"});
    auto& cfg = m.integration;
    cfg.steps_per_period = count(ic, "steps_per_period", "integration", cfg.steps_per_period);
    cfg.ramp_periods = count(ic, "ramp_periods", "integration", cfg.ramp_periods);
    cfg.measure_periods = count(ic, "measure_periods", "integration", cfg.measure_periods);
    cfg.max_periods = count(ic, "max_periods", "integration", cfg.max_periods);
    cfg.convergence_tol = number(ic, "convergence_tol", "integration", cfg.convergence_tol);
  }

  if (j.contains("output_dir")) rc.output_dir = resolve(base_dir, j.at("output_dir"), "output_dir");
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      throw InvalidInput("config: 'seed' must be a non-negative integer");
    }
    rc.seed = seed.get<std::uint64_t>();
  }

  m.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open config file '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    return parse_run_config(j, path.parent_path());
  } catch (const InvalidInput& e) {
    throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
  }
}

RunConfig reference_run_config() {
  RunConfig rc;
  rc.model = reference_model();
  return rc;
}

}  // namespace oswec
