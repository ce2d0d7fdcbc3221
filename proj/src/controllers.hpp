#pragma once

#include <span>
#include <vector>

#include "types.hpp"

namespace preimpact {

// ---------------------------------------------------------------------------
// Control parts
// ---------------------------------------------------------------------------

/// Acceleration of a virtual object simulated by an admittance part:
///   a_v = a_ref + [f_in - D*(v_v - v_ref) - K*(x_v - x_ref)] / M.
/// The reference is the desired state for the first stage or the upstream
/// virtual object for later stages.
double admittance_accel(const SecondOrderParams& p, const MotionState& stage,
                        const MotionState& reference, double f_in);

/// Impedance-part input laws. full_feedforward keeps the m*a_v feedforward
/// term, no_feedforward drops it, mi_equals_m is the common simplification
/// with the desired inertia fixed to the plant mass (independent of f_c).
enum class ImpedanceLaw { full_feedforward, no_feedforward, mi_equals_m };

double impedance_input(ImpedanceLaw law, const SecondOrderParams& p, double plant_mass,
                       const MotionState& plant, const MotionState& virtual_obj,
                       double f_c);

struct PdGains {
  double kp = 1e6;   // [N/m]
  double kd = 1414.2135623730951;  // [N*s/m], 2*sqrt(m*kp) for m = 0.5

  void validate() const;
};

/// Computed-torque PD: u = m*a_target + kd*(v_target - v) + kp*(x_target - x).
double pd_tracking_input(const PdGains& g, const MotionState& plant,
                         const MotionState& target, double plant_mass);

// ---------------------------------------------------------------------------
// Serial chain
// ---------------------------------------------------------------------------

/// Force channel feeding an admittance stage.
enum class ForceSource { virtual_force, contact_force };

struct StageConfig {
  SecondOrderParams params;
  ForceSource source = ForceSource::virtual_force;
};

enum class TerminalKind { impedance, pd };

/// Ordered admittance stages plus a terminal law. Stage 0 references the
/// desired state; stage k references stage k-1's virtual object. The terminal
/// tracks the last stage: either an impedance part or a PD controller.
struct ChainSpec {
  std::vector<StageConfig> stages;
  TerminalKind terminal = TerminalKind::impedance;
  SecondOrderParams impedance{};                    // terminal == impedance
  ImpedanceLaw law = ImpedanceLaw::mi_equals_m;     // terminal == impedance
  PdGains pd{};                                     // terminal == pd

  std::size_t stage_count() const { return stages.size(); }
  void validate() const;

  /// One proximity-driven admittance stage, impedance terminal.
  static ChainSpec pacic(const SecondOrderParams& admittance,
                         const SecondOrderParams& impedance, ImpedanceLaw law);

  /// Proximity-driven stage, contact-driven stage, PD terminal.
  static ChainSpec pacac(const SecondOrderParams& stage1,
                         const SecondOrderParams& stage2, const PdGains& pd);
};

/// Held force-channel values for one evaluation (world frame).
struct ChainSignals {
  double f_p = 0.0;  // virtual viscous force
  double f_c = 0.0;  // contact force on the plant
};

/// Evaluates the cascade at one instant: stage accelerations upstream to
/// downstream, then the terminal control force on the plant.
/// `stage_states` carries (x, v) per stage; the computed accelerations are
/// written to `stage_accels_out` (same length). Returns u.
double chain_eval(const ChainSpec& spec, const DesiredState& desired,
                  std::span<const MotionState> stage_states, const PlantState& plant,
                  const ChainSignals& forces, double plant_mass,
                  std::span<double> stage_accels_out);

}  // namespace preimpact
