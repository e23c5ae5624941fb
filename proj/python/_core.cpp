// Thin bindings. Results cross the boundary as JSON text; the Python
// package turns them into dicts.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "oswec/config.hpp"
#include "oswec/energy.hpp"
#include "oswec/error.hpp"
#include "oswec/sweep.hpp"
#include "oswec/verify.hpp"

namespace py = pybind11;
using namespace oswec;

namespace {

std::string simulate_torque(const RunConfig& rc, const std::string& scenario, double period, double amplitude,
                            double distance) {
  const auto kind = parse_scenario(scenario);
  if (!kind) throw InvalidInput("unknown scenario '" + scenario + "'");
  const auto& m = rc.model;
  const auto forcing = build_torque_scenario({*kind, amplitude, period, distance}, m.env);
  const auto labels = *kind == ScenarioKind::SingleBaseline ? std::vector<std::string>{"single"}
                                                            : std::vector<std::string>{"left", "right"};
  py::gil_scoped_release release;
  return to_json(simulate_case(m, forcing, period, distance), labels).dump();
}

std::string simulate_wave(const RunConfig& rc, double height, double period, double distance, double heading) {
  const auto& m = rc.model;
  const WaveCondition w{height, period, heading};
  const auto forcing = distance > 0.0 ? build_wave_forcing(w, distance, m.transfer, m.env)
                                      : build_single_wave_forcing(w, m.transfer, m.env);
  const auto labels = distance > 0.0 ? std::vector<std::string>{"front", "back"}
                                     : std::vector<std::string>{"single"};
  py::gil_scoped_release release;
  return to_json(simulate_case(m, forcing, period, distance), labels).dump();
}

std::string sweep(const RunConfig& rc, const std::string& name, unsigned workers,
                  std::optional<std::vector<double>> distances, std::optional<std::vector<double>> periods) {
  const auto study = parse_study(name);
  if (!study) throw InvalidInput("unknown study '" + name + "'");
  SweepPlan plan;
  if (distances) plan.distances = *distances;
  if (periods) (*study == StudyKind::Torque ? plan.torque_periods : plan.wave_periods) = *periods;
  py::gil_scoped_release release;
  switch (*study) {
    case StudyKind::Torque: return to_json(run_torque_study(plan, rc.model, workers)).dump();
    case StudyKind::Wave: return to_json(run_wave_study(plan, rc.model, workers)).dump();
    default: return to_json(run_heading_study(plan, rc.model, workers)).dump();
  }
}

std::string aep(const RunConfig& rc, const std::filesystem::path& jpd_path, const std::vector<double>& distances,
                double heading, unsigned workers) {
  const JPD jpd = load_jpd(jpd_path);
  py::gil_scoped_release release;
  return to_json(run_aep_table(rc.model, jpd, distances, heading, {workers, true})).dump();
}

py::dict verify(int cases, std::uint64_t seed, unsigned workers) {
  VerifyOptions opt;
  opt.cases = cases;
  opt.seed = seed;
  opt.workers = workers;
  VerifyReport report;
  {
    py::gil_scoped_release release;
    report = run_oracle_suite(opt);
  }
  py::list out;
  for (const auto& c : report.cases) {
    py::dict props;
    for (const auto& p : c.properties) props[py::str(p.name)] = py::make_tuple(p.passed, p.detail);
    py::dict d;
    d["index"] = c.index;
    d["dof"] = c.input.system.dof();
    d["passed"] = c.passed();
    d["properties"] = props;
    out.append(d);
  }
  py::dict r;
  r["passed"] = report.passed();
  r["cases"] = out;
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the oswec package";

  auto invalid = py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)invalid;

  py::class_<RunConfig>(m, "RunConfig")
      .def_static("reference", &reference_run_config)
      .def_static("load", &load_run_config, py::arg("path"))
      .def_property_readonly("coefficient_label", [](const RunConfig& rc) { return rc.model.coefficient_label(); })
      .def_property_readonly("seed", [](const RunConfig& rc) { return rc.seed; })
      .def(
          "coefficients",
          [](const RunConfig& rc, double period, double distance) {
            const auto c = coefficients_for(rc.model, period, distance);
            py::dict d;
            d["added_inertia"] = c.added_inertia;
            d["damping"] = c.damping;
            d["coupling_inertia"] = c.coupling_inertia;
            d["coupling_damping"] = c.coupling_damping;
            return d;
          },
          py::arg("period"), py::arg("distance") = 0.0)
      .def("simulate_torque", &simulate_torque, py::arg("scenario"), py::arg("period"), py::arg("amplitude"),
           py::arg("distance") = 0.0)
      .def("simulate_wave", &simulate_wave, py::arg("height"), py::arg("period"), py::arg("distance") = 0.0,
           py::arg("heading") = 0.0)
      .def("sweep", &sweep, py::arg("study"), py::arg("workers") = 1, py::arg("distances") = py::none(),
           py::arg("periods") = py::none())
      .def("aep", &aep, py::arg("jpd"), py::arg("distances"), py::arg("heading") = 0.0, py::arg("workers") = 1);

  m.def(
      "wavelength",
      [](double period, std::optional<double> depth, double gravity) {
        Environment env;
        env.gravity = gravity;
        env.water_depth = depth;
        env.validate();
        return wavelength(period, env);
      },
      py::arg("period"), py::arg("depth") = py::none(), py::arg("gravity") = kDefaultGravity);
  m.def("verify", &verify, py::arg("cases") = 20, py::arg("seed") = VerifyOptions{}.seed, py::arg("workers") = 1);
}
