#include "oswec/model.hpp"

#include <fmt/format.h>

#include "oswec/energy.hpp"
#include "oswec/error.hpp"

namespace oswec {

void PtoSettings::validate() const {
  if (fixed_damping) {
    if (!(*fixed_damping >= 0.0)) {
      throw InvalidInput(fmt::format("PTO damping must be non-negative, got {}", *fixed_damping));
    }
  } else if (!(share_of_damping >= 0.0 && share_of_damping <= 1.0)) {
    throw InvalidInput(fmt::format("PTO share of damping must lie in [0, 1], got {}", share_of_damping));
  }
}

PTOModel PtoSettings::resolve(const HydroCoefficients& coeffs) const {
  PTOModel pto;
  pto.damping = fixed_damping ? *fixed_damping : share_of_damping * coeffs.damping;
  pto.included_in_damping = included_in_damping;
  if (included_in_damping && pto.damping > coeffs.damping) {
    throw InvalidInput(fmt::format("PTO damping {} exceeds the total damping {} it is part of",
                                   pto.damping, coeffs.damping));
  }
  return pto;
}

void ModelConfig::validate() const {
  env.validate();
  flap.validate();
  if (const auto* table = std::get_if<CoefficientTable>(&coefficients)) {
    if (table->empty()) throw InvalidInput("coefficient table is empty");
  } else {
    const auto& analytic = std::get<AnalyticCoefficients>(coefficients);
    analytic.base.validate();
    analytic.kernel.validate();
  }
  if (transfer.empty()) throw InvalidInput("excitation transfer table is empty");
  pto.validate();
  integration.validate();
}

std::string ModelConfig::coefficient_label() const {
  if (const auto* table = std::get_if<CoefficientTable>(&coefficients)) {
    return fmt::format("table({}x{})", table->periods().size(), table->distances().size());
  }
  const auto& k = std::get<AnalyticCoefficients>(coefficients).kernel;
  return fmt::format("analytic(alpha={}, epsilon={})", k.alpha, k.epsilon);
}

HydroCoefficients coefficients_for(const ModelConfig& model, double period, double distance) {
  if (!(distance >= 0.0)) {
    throw InvalidInput(fmt::format("separation distance must be non-negative, got {}", distance));
  }
  if (const auto* table = std::get_if<CoefficientTable>(&model.coefficients)) {
    if (distance == 0.0) {
      return coefficients_at(*table, period, table->distances().back()).isolated();
    }
    return coefficients_at(*table, period, distance);
  }
  const auto& analytic = std::get<AnalyticCoefficients>(model.coefficients);
  if (distance == 0.0) return analytic.base.isolated();
  return analytic_coupling(analytic.base, distance, solve_dispersion(period, model.env),
                           analytic.kernel);
}

SystemMatrices system_for(const ModelConfig& model, const HydroCoefficients& coeffs,
                          const PTOModel& pto, int dof) {
  SystemMatrices s = assemble_system(model.flap, coeffs, dof);
  if (!pto.included_in_damping) s.damping.diagonal().array() += pto.damping;
  return s;
}

CaseResult simulate_case(const ModelConfig& model, const ForcingSpec& forcing, double period,
                         double distance, bool keep_record) {
  const int dof = static_cast<int>(forcing.flaps.size());
  const HydroCoefficients coeffs = coefficients_for(model, period, dof == 1 ? 0.0 : distance);
  const PTOModel pto = model.pto.resolve(coeffs);
  const SystemMatrices system = system_for(model, coeffs, pto, dof);

  ResponseRecord record = integrate(system, forcing, model.integration);
  CaseResult out;
  out.metrics = response_metrics(record, forcing.omega, model.integration);
  const MeanPower p = mean_power(record, pto, model.integration);
  out.power = p.per_flap;
  out.total_power = p.total;
  out.balance = power_balance(record, system, forcing, model.integration);
  out.pto_damping = pto.damping;
  if (keep_record) out.record = std::move(record);
  return out;
}

nlohmann::json to_json(const CaseResult& r, const std::vector<std::string>& labels) {
  if (labels.size() != r.metrics.flaps.size()) throw InvalidInput("one label per flap required");
  nlohmann::json flaps = nlohmann::json::object();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& m = r.metrics.flaps[i];
    flaps[labels[i]] = {{"rms_rad", m.rms_rotation},
                        {"amplitude_rad", m.amplitude},
                        {"phase_rad", m.phase},
                        {"power_W", r.power.at(i)}};
  }
  return {{"flaps", std::move(flaps)},
          {"total_power_W", r.total_power},
          {"pto_damping_Nms_per_rad", r.pto_damping},
          {"steady", r.metrics.steady},
          {"cycles_used", r.metrics.cycles_used},
          {"power_balance", {{"input_W", r.balance.input},
                             {"dissipated_W", r.balance.dissipated},
                             {"relative_error", r.balance.relative_error()}}}};
}

ModelConfig reference_model() {
  ModelConfig m;
  m.flap = {9.8e6, 4.375e6};
  m.coefficients = AnalyticCoefficients{{2.0e5, 1.0e6, 0.0, 0.0}, {0.05, 0.1}};
  // 1.75 m waves at 8.5 s give a 1.0 MN m front-flap torque.
  m.transfer = ExcitationTransfer::constant(1.0e6 / (1.75 / 2.0), 0.1);
  return m;
}

}  // namespace oswec
