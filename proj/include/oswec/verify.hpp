#pragma once

// Built-in oracle suite: time-domain integration against the frequency-domain
// solve, power balance and linearity on randomized well-posed systems.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oswec/dynamics.hpp"

namespace oswec {

struct OracleCase {
  SystemMatrices system;
  ForcingSpec forcing;

  nlohmann::json describe() const;
};

struct VerifyOptions {
  int cases = 20;
  std::uint64_t seed = 20240611;
  IntegrationConfig integration;
  unsigned workers = 1;
  double amplitude_tol = 0.01;  // relative
  double phase_tol = 0.02;      // rad
  double balance_tol = 0.01;    // relative
  double linearity_tol = 1e-4;  // relative
  /// Test hook: evaluates dissipation with the damping sign flipped.
  bool flip_dissipation_sign = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CaseReport {
  int index = 0;
  OracleCase input;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

struct VerifyReport {
  std::vector<CaseReport> cases;

  bool passed() const;
};

/// Random 1-DOF or symmetric 2-DOF system: modal damping ratios in
/// [0.02, 1], forcing between 0.5 and 2 times the uncoupled natural frequency.
OracleCase random_oracle_case(std::mt19937_64& rng, int dof);

CaseReport check_oracle_case(const OracleCase& input, const VerifyOptions& options);

/// Alternates 1-DOF and 2-DOF cases drawn from `options.seed`.
VerifyReport run_oracle_suite(const VerifyOptions& options);

}  // namespace oswec
