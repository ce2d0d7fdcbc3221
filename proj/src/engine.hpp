#pragma once

#include <optional>

#include "scenario.hpp"
#include "trace.hpp"

namespace preimpact {

struct RunDiagnostics {
  std::size_t sensor_signal_lost = 0;  // f_p substituted with 0 (xi <= 0)
  std::size_t saturation_hits = 0;     // f_p clamped by the saturation cap
  std::optional<double> obstacle_release_time;  // approach -> free switch
};

struct RunResult {
  SimTrace trace;
  RunDiagnostics diags;
};

/// Executes one scenario. Deterministic: identical scenarios produce
/// bit-identical traces. Throws IntegrationFault on numeric failure.
///
/// Stepping: the sensor pipeline (model, low-pass filter, backward-difference
/// rate) runs once per step; f_p and f_c are sampled at the step start and
/// held through the integration stages, while the control force tracks the
/// stage states unless control_hold freezes it at the control rate.
RunResult run_scenario(const Scenario& sc);

}  // namespace preimpact
