#include "controllers.hpp"

namespace preimpact {

double admittance_accel(const SecondOrderParams& p, const MotionState& stage,
                        const MotionState& reference, double f_in) {
  return reference.a +
         (f_in - p.D * (stage.v - reference.v) - p.K * (stage.x - reference.x)) / p.M;
}

double impedance_input(ImpedanceLaw law, const SecondOrderParams& p, double plant_mass,
                       const MotionState& plant, const MotionState& virtual_obj,
                       double f_c) {
  const double dv = plant.v - virtual_obj.v;
  const double dx = plant.x - virtual_obj.x;
  switch (law) {
    case ImpedanceLaw::full_feedforward:
      return (plant_mass / p.M - 1.0) * f_c + plant_mass * virtual_obj.a -
             plant_mass / p.M * (p.D * dv + p.K * dx);
    case ImpedanceLaw::no_feedforward:
      return (plant_mass / p.M - 1.0) * f_c - plant_mass / p.M * (p.D * dv + p.K * dx);
    case ImpedanceLaw::mi_equals_m:
      return -p.D * dv - p.K * dx;
  }
  return 0.0;  // unreachable
}

void PdGains::validate() const {
  if (!(kp > 0.0) || !(kd > 0.0)) throw ConfigError("PD gains kp, kd must be > 0");
}

double pd_tracking_input(const PdGains& g, const MotionState& plant,
                         const MotionState& target, double plant_mass) {
  return plant_mass * target.a + g.kd * (target.v - plant.v) +
         g.kp * (target.x - plant.x);
}

void ChainSpec::validate() const {
  if (stages.empty()) throw ConfigError("controller chain needs at least one stage");
  for (const StageConfig& s : stages) s.params.validate();
  if (terminal == TerminalKind::impedance) {
    impedance.validate();
  } else {
    pd.validate();
  }
}

ChainSpec ChainSpec::pacic(const SecondOrderParams& admittance,
                           const SecondOrderParams& impedance, ImpedanceLaw law) {
  ChainSpec spec;
  spec.stages.push_back({admittance, ForceSource::virtual_force});
  spec.terminal = TerminalKind::impedance;
  spec.impedance = impedance;
  spec.law = law;
  spec.validate();
  return spec;
}

ChainSpec ChainSpec::pacac(const SecondOrderParams& stage1,
                           const SecondOrderParams& stage2, const PdGains& pd) {
  ChainSpec spec;
  spec.stages.push_back({stage1, ForceSource::virtual_force});
  spec.stages.push_back({stage2, ForceSource::contact_force});
  spec.terminal = TerminalKind::pd;
  spec.pd = pd;
  spec.validate();
  return spec;
}

double chain_eval(const ChainSpec& spec, const DesiredState& desired,
                  std::span<const MotionState> stage_states, const PlantState& plant,
                  const ChainSignals& forces, double plant_mass,
                  std::span<double> stage_accels_out) {
  MotionState reference = desired;
  MotionState last{};
  for (std::size_t k = 0; k < spec.stages.size(); ++k) {
    const StageConfig& stage = spec.stages[k];
    const double f_in =
        stage.source == ForceSource::virtual_force ? forces.f_p : forces.f_c;
    MotionState current = stage_states[k];
    current.a = admittance_accel(stage.params, current, reference, f_in);
    stage_accels_out[k] = current.a;
    reference = current;
    last = current;
  }
  if (spec.terminal == TerminalKind::impedance) {
    return impedance_input(spec.law, spec.impedance, plant_mass, plant, last,
                           forces.f_c);
  }
  return pd_tracking_input(spec.pd, plant, last, plant_mass);
}

}  // namespace preimpact
