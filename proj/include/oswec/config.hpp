#pragma once

// Run configuration: a JSON file with unit-suffixed keys.
//
//   {
//     "environment": {"gravity_m_per_s2": 9.81, "water_depth_m": "deep"},
//     "flap": {"inertia_dry_kg_m2": 9.8e6, "stiffness_Nm_per_rad": 4.375e6},
//     "coefficients": {"analytic": {"added_inertia_kg_m2": 2e5, "damping_Nms_per_rad": 1e6,
//                                   "alpha": 0.05, "epsilon": 0.1}},
//     "excitation": {"transfer_file": "transfer.csv", "back_flap_eta": 0.1},
//     "pto": {"share_of_damping": 0.5, "included_in_damping": true},
//     "integration": {"steps_per_period": 200, "ramp_periods": 10, "measure_periods": 10,
//                     "max_periods": 200, "convergence_tol": 1e-4},
//     "output_dir": "out",
//     "seed": 0
//   }
//
// "coefficients" takes exactly one of "analytic" or "table_file"; "excitation"
// takes exactly one of "transfer_file" or "gamma_Nm_per_m". Relative paths
// resolve against the directory of the config file.

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "oswec/model.hpp"

namespace oswec {

struct RunConfig {
  ModelConfig model;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;  // reserved; the simulation core is deterministic
};

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// The shipped reference configuration.
RunConfig reference_run_config();

}  // namespace oswec
