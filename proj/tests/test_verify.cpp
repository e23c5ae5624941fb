#include <doctest.h>

#include <cmath>

#include "oswec/verify.hpp"

using namespace oswec;

namespace {

const PropertyResult& property(const CaseReport& r, const std::string& name) {
  for (const auto& p : r.properties) {
    if (p.name == name) return p;
  }
  FAIL("no property " << name);
  throw;
}

}  // namespace

TEST_CASE("random oracle cases are well posed") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const int dof = 1 + i % 2;
    const auto c = random_oracle_case(rng, dof);
    CHECK(c.system.dof() == dof);
    CHECK(c.forcing.flaps.size() == static_cast<std::size_t>(dof));
    const double wn = std::sqrt(c.system.stiffness(0) / c.system.inertia(0, 0));
    CHECK(c.forcing.omega >= 0.5 * wn * (1 - 1e-12));
    CHECK(c.forcing.omega <= 2.0 * wn * (1 + 1e-12));
    if (dof == 2) {
      CHECK(c.system.inertia(0, 1) == c.system.inertia(1, 0));
      CHECK(std::abs(c.system.inertia(0, 1)) < c.system.inertia(0, 0));
      CHECK(std::abs(c.system.damping(0, 1)) < c.system.damping(0, 0));
    }
  }
}

TEST_CASE("oracle suite passes") {
  VerifyOptions opt;
  opt.cases = 20;
  const auto report = run_oracle_suite(opt);
  REQUIRE(report.cases.size() == 20);
  for (const auto& c : report.cases) {
    CAPTURE(c.index);
    CHECK(c.properties.size() == 4);
    for (const auto& p : c.properties) {
      CAPTURE(p.name);
      CAPTURE(p.detail);
      CHECK(p.passed);
    }
  }
  CHECK(report.passed());
  CHECK(report.cases[1].input.system.dof() == 2);
}

TEST_CASE("suite is reproducible and independent of workers") {
  VerifyOptions a;
  a.cases = 6;
  VerifyOptions b = a;
  b.workers = 3;
  const auto ra = run_oracle_suite(a);
  const auto rb = run_oracle_suite(b);
  for (std::size_t i = 0; i < ra.cases.size(); ++i) {
    CHECK(ra.cases[i].input.describe() == rb.cases[i].input.describe());
    for (std::size_t p = 0; p < ra.cases[i].properties.size(); ++p) {
      CHECK(ra.cases[i].properties[p].detail == rb.cases[i].properties[p].detail);
    }
  }
}

TEST_CASE("flipped dissipation sign is caught") {
  VerifyOptions opt;
  opt.cases = 4;
  opt.flip_dissipation_sign = true;
  const auto report = run_oracle_suite(opt);
  CHECK_FALSE(report.passed());
  for (const auto& c : report.cases) {
    CHECK_FALSE(property(c, "energy_balance").passed);
    CHECK(property(c, "freq_vs_time").passed);
  }
}

TEST_CASE("zero-amplitude case passes trivially") {
  std::mt19937_64 rng(5);
  for (int dof : {1, 2}) {
    auto c = random_oracle_case(rng, dof);
    for (auto& f : c.forcing.flaps) f.amplitude = 0.0;
    const auto r = check_oracle_case(c, VerifyOptions{});
    for (const auto& p : r.properties) {
      CAPTURE(p.name);
      CAPTURE(p.detail);
      CHECK(p.passed);
    }
  }
}

TEST_CASE("case description carries the full parameter set") {
  std::mt19937_64 rng(9);
  const auto c = random_oracle_case(rng, 2);
  const auto j = c.describe();
  CHECK(j["dof"] == 2);
  CHECK(j["inertia_kg_m2"].size() == 2);
  CHECK(j["damping_Nms_per_rad"][0].size() == 2);
  CHECK(j["stiffness_Nm_per_rad"].size() == 2);
  CHECK(j["forcing"].size() == 2);
  CHECK(j["omega_rad_per_s"].get<double>() == c.forcing.omega);
}
