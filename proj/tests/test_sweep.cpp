#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oswec/error.hpp"
#include "oswec/sweep.hpp"

using namespace oswec;

namespace {

ModelConfig uncoupled_model() {
  ModelConfig m = reference_model();
  std::get<AnalyticCoefficients>(m.coefficients).kernel.alpha = 0.0;
  m.transfer = ExcitationTransfer::constant(m.transfer.gamma().front(), 0.0);
  return m;
}

std::string csv(const SweepReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

const SweepRow& find_row(const SweepReport& r, std::string_view scenario, double d, double te, double amp) {
  const auto it = std::find_if(r.rows.begin(), r.rows.end(), [&](const SweepRow& row) {
    return row.scenario == scenario && row.distance == d && row.period == te && row.amplitude == amp;
  });
  REQUIRE(it != r.rows.end());
  return *it;
}

}  // namespace

TEST_CASE("spacing bands") {
  CHECK(classify_spacing(0.0581) == SpacingBand::Short);
  CHECK(classify_spacing(0.1139) == SpacingBand::Short);  // rounds to 0.11
  CHECK(classify_spacing(0.116) == SpacingBand::Other);
  CHECK(classify_spacing(0.054) == SpacingBand::Other);
  CHECK(classify_spacing(0.41) == SpacingBand::Long);
  CHECK(classify_spacing(0.797) == SpacingBand::Long);
  CHECK(classify_spacing(0.806) == SpacingBand::Other);
  CHECK(to_string(SpacingBand::Short) == "0.06-0.11");
  CHECK(parse_study("wave") == StudyKind::Wave);
  CHECK_FALSE(parse_study("tidal").has_value());
}

TEST_CASE("torque study") {
  const SweepPlan plan;
  const auto report = run_torque_study(plan, reference_model());

  SUBCASE("grid shape and order") {
    CHECK(report.rows.size() == 5 * 7 * 4 * 4);
    CHECK(report.flap_labels == std::vector<std::string>{"left", "right"});
    CHECK(report.rows.front().scenario == "right-only-left-fixed");
    CHECK(report.rows[1].amplitude == 0.8e6);
    CHECK(report.rows[4].period == 8.5);
    CHECK(report.rows[16].distance == 15.0);
    CHECK(report.rows.back().scenario == "arbitrary-phase");
    for (const auto& row : report.rows) {
      CHECK(row.status == "ok");
      CHECK(row.steady);
      CHECK(row.balance_error < 0.01);
    }
  }

  SUBCASE("in phase amplifies and out of phase suppresses at d = 10 m") {
    for (double te : plan.torque_periods) {
      for (double t0 : plan.torque_amplitudes) {
        CAPTURE(te);
        const auto& in = find_row(report, "in-phase", 10.0, te, t0);
        const auto& out = find_row(report, "out-of-phase", 10.0, te, t0);
        CHECK(in.rms_ratio[0] > 1.0);
        CHECK(in.rms_ratio[1] > 1.0);
        CHECK(out.rms_ratio[0] < 1.0);
        CHECK(out.rms_ratio[1] < 1.0);
      }
    }
  }

  SUBCASE("ratios match an independent baseline run") {
    const ModelConfig m = reference_model();
    for (std::size_t i = 0; i < report.rows.size(); i += 37) {
      const auto& row = report.rows[i];
      const auto single = simulate_case(
          m, build_torque_scenario({ScenarioKind::SingleBaseline, row.amplitude, row.period, 0.0}, m.env),
          row.period, 0.0);
      const double s = single.metrics.flaps[0].rms_rotation;
      CHECK(row.single.rms_rotation == s);
      for (std::size_t f = 0; f < row.flaps.size(); ++f) {
        CHECK(row.rms_ratio[f] == doctest::Approx(row.flaps[f].rms_rotation / s).epsilon(1e-14));
      }
    }
  }

  SUBCASE("d / lambda agrees with the dispersion module") {
    for (const auto& row : report.rows) {
      const double expected = row.distance / wavelength(row.period, Environment{});
      CHECK(row.d_over_lambda == doctest::Approx(expected).epsilon(1e-15));
      CHECK(row.band == classify_spacing(expected));
    }
  }
}

TEST_CASE("torque study without coupling") {
  SweepPlan plan;
  plan.scenarios = {ScenarioKind::RightOnlyLeftFixed, ScenarioKind::RightOnlyLeftFree, ScenarioKind::InPhase};
  const auto report = run_torque_study(plan, uncoupled_model());
  for (const auto& row : report.rows) {
    CHECK(row.rms_ratio[1] == doctest::Approx(1.0).epsilon(0.005));
    if (row.scenario == "right-only-left-free") CHECK(row.flaps[0].rms_rotation == 0.0);
  }
}

TEST_CASE("torque study can include the baseline as a scenario") {
  SweepPlan plan;
  plan.scenarios = {ScenarioKind::SingleBaseline};
  plan.torque_periods = {9.5};
  plan.torque_amplitudes = {0.6e6};
  const auto report = run_torque_study(plan, reference_model());
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].distance == 0.0);
  CHECK(report.rows[0].flaps.size() == 1);
  CHECK(report.rows[0].rms_ratio[0] == 1.0);
}

TEST_CASE("wave study") {
  const SweepPlan plan;
  const auto report = run_wave_study(plan, reference_model());

  SUBCASE("grid shape and order") {
    CHECK(report.rows.size() == 7 * 9 * 2);
    CHECK(report.flap_labels == std::vector<std::string>{"front", "back"});
    CHECK(report.rows[0].distance == 10.0);
    CHECK(report.rows[1].amplitude == 3.25);
    CHECK(report.rows[2].period == 8.0);
    for (const auto& row : report.rows) CHECK(row.status == "ok");
  }

  SUBCASE("spacing bands for 10 m and 70 m") {
    for (const auto& row : report.rows) {
      if (row.distance == 10.0 && row.period <= 10.5) {
        CHECK(row.d_over_lambda >= 0.058);
        CHECK(row.d_over_lambda <= 0.114);
        CHECK(row.band == SpacingBand::Short);
      }
      if (row.distance == 70.0 && row.period <= 10.5) {
        CHECK(row.d_over_lambda >= 0.40);
        CHECK(row.d_over_lambda <= 0.80);
        CHECK(row.band == SpacingBand::Long);
      }
    }
    // Past 10.5 s the 70 m spacing drops below 0.41 lambda.
    CHECK(find_row(report, "wave", 70.0, 11.5, 1.75).d_over_lambda == doctest::Approx(0.3390).epsilon(1e-3));
  }

  SUBCASE("front flap responds more, by less as the flaps separate") {
    double last = 1e300;
    for (double d : {10.0, 45.0, 70.0}) {
      const auto& row = find_row(report, "wave", d, 9.5, 1.75);
      const double gap = row.flaps[0].rms_rotation - row.flaps[1].rms_rotation;
      CAPTURE(d);
      CHECK(gap > 0.0);
      CHECK(gap < last);
      last = gap;
    }
  }

  SUBCASE("power is quadratic in height") {
    for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
      const double scale = std::pow(3.25 / 1.75, 2);
      CHECK(report.rows[i + 1].total_power == doctest::Approx(scale * report.rows[i].total_power).epsilon(0.01));
    }
  }
}

TEST_CASE("wave study without coupling or transmission loss") {
  SweepPlan plan;
  plan.distances = {10.0, 45.0, 70.0};
  const auto report = run_wave_study(plan, uncoupled_model());
  // Equal up to the transient left inside the convergence tolerance.
  for (const auto& row : report.rows) {
    CHECK(row.flaps[1].rms_rotation == doctest::Approx(row.flaps[0].rms_rotation).epsilon(1e-4));
    CHECK(row.flaps[1].amplitude == doctest::Approx(row.flaps[0].amplitude).epsilon(1e-4));
    CHECK(row.rms_ratio[0] == doctest::Approx(1.0).epsilon(0.005));
  }
}

TEST_CASE("heading study") {
  const SweepPlan plan;
  const auto report = run_heading_study(plan, reference_model());
  REQUIRE(report.rows.size() == 10);
  CHECK(report.rows[0].heading == 0.0);
  CHECK(*report.rows[0].loss == 0.0);
  double last = -1.0;
  for (const auto& row : report.rows) {
    REQUIRE(row.loss.has_value());
    CHECK(*row.loss >= last);
    last = *row.loss;
    CHECK(row.distance == 45.0);
    CHECK(row.period == 8.5);
  }
  CHECK(*report.rows[6].loss == doctest::Approx(0.25).epsilon(0.04));  // 30 deg
  CHECK(std::abs(*report.rows[9].loss - 0.5) < 0.01);                 // 45 deg

  SUBCASE("loss still computed without a zero heading in the plan") {
    SweepPlan p;
    p.headings = {45.0};
    const auto r = run_heading_study(p, reference_model());
    REQUIRE(r.rows.size() == 1);
    CHECK(*r.rows[0].loss == doctest::Approx(*report.rows[9].loss));
  }
}

TEST_CASE("reports are deterministic across worker counts") {
  SweepPlan plan;
  plan.distances = {10.0, 70.0};
  plan.torque_periods = {8.5, 9.5};
  plan.torque_amplitudes = {1.0e6};
  const ModelConfig m = reference_model();
  const auto a = run_torque_study(plan, m, 1);
  const auto b = run_torque_study(plan, m, 4);
  CHECK(csv(a) == csv(b));
  CHECK(to_json(a).dump() == to_json(b).dump());

  plan.wave_periods = {8.5, 11.5};
  CHECK(csv(run_wave_study(plan, m, 1)) == csv(run_wave_study(plan, m, 3)));
  CHECK(csv(run_heading_study(plan, m, 1)) == csv(run_heading_study(plan, m, 5)));
}

TEST_CASE("report outputs") {
  SweepPlan plan;
  plan.distances = {45.0};
  plan.wave_periods = {8.5};
  plan.wave_heights = {1.75};
  const auto report = run_wave_study(plan, reference_model());
  const std::string text = csv(report);
  std::istringstream in(text);
  std::string comment, header;
  std::getline(in, comment);
  std::getline(in, header);
  CHECK(comment.rfind("# wave study", 0) == 0);
  CHECK(header.rfind("scenario,distance_m,period_s,height_m,heading_deg,d_over_lambda,band,front_rms_rad,", 0) == 0);
  CHECK(header.find("back_rms_ratio") != std::string::npos);

  const auto j = to_json(report);
  CHECK(j["study"] == "wave");
  CHECK(j["rows"] == 1);
  CHECK(j["grid"][0]["distance_m"] == 45.0);
  CHECK(j["grid"][0]["values"][0]["period_s"] == 8.5);
}

TEST_CASE("invalid plans") {
  SweepPlan empty;
  empty.distances.clear();
  CHECK_THROWS_AS(run_torque_study(empty, reference_model()), InvalidInput);
  CHECK_THROWS_AS(run_wave_study(empty, reference_model()), InvalidInput);

  SweepPlan negative;
  negative.wave_heights = {-1.0};
  CHECK_THROWS_AS(run_wave_study(negative, reference_model()), InvalidInput);

  SweepPlan steep;
  steep.headings = {0.0, 90.0};
  CHECK_THROWS_AS(run_heading_study(steep, reference_model()), InvalidInput);

  SweepPlan no_scenarios;
  no_scenarios.scenarios.clear();
  CHECK_THROWS_AS(run_torque_study(no_scenarios, reference_model()), InvalidInput);
}
