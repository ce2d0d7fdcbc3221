#pragma once

#include <cstdint>
#include <string>

#include "configdoc.hpp"
#include "controllers.hpp"
#include "environment.hpp"
#include "integrator.hpp"
#include "sensing.hpp"
#include "types.hpp"

namespace preimpact {

/// Collision situations: an obstacle approaches the holding plant in (a) and
/// (c); the plant follows a minimum-jerk path into a fixed obstacle in (b)
/// and (d). (a)/(b) put the obstacle on the negative side of the plant,
/// (c)/(d) on the positive side.
enum class ScenarioKind { a, b, c, d };

ScenarioKind scenario_kind_from_string(const std::string& s);
std::string to_string(ScenarioKind kind);

/// Desired-state source: constant hold or a minimum-jerk segment.
struct TrajectoryPlan {
  enum class Kind { hold, min_jerk };
  Kind kind = Kind::hold;
  double hold_x = 0.0;
  MinJerkSpec mj{};

  DesiredState at(double t) const;
};

/// Fully resolved run description; a run is a pure function of this struct.
struct Scenario {
  ScenarioKind kind = ScenarioKind::c;

  double plant_mass = 0.5;
  ChainSpec controller;
  double init_sigma = 0.0;  // initial x_v1 - x_d offset (verification aid)
  double init_nu = 0.0;     // initial v_v1 - v_d offset

  SensorParams sensor{};
  FilterConfig filter{};  // sample rate is the simulation rate
  VirtualForceGain gain{};
  double noise_std = 0.0;  // Gaussian noise on the raw sensor output
  std::uint64_t seed = 0;
  int trials = 1;

  ContactModel contact{};
  ObstacleLaw obstacle_law{};
  double obstacle_x0 = 0.05;
  /// Direction of the contact force on the plant: -1 when the obstacle sits on
  /// the positive side, +1 otherwise.
  double contact_normal = -1.0;

  TrajectoryPlan trajectory{};
  IntegratorConfig integrator{};
  bool control_hold = false;  // zero-order hold of f_p and u at the control rate
  double control_dt = 1e-3;

  bool report_baseline = true;  // pair the run with g_p = 0 for the reduction effect

  void validate() const;
};

/// Scenario with per-kind defaults (Table-style gains, default contact model,
/// default geometry).
Scenario build_scenario(ScenarioKind kind);

/// Maps a parsed config document onto a Scenario. Unknown keys and
/// cross-field violations raise ConfigError with the offending line.
Scenario scenario_from_doc(const ConfigDoc& doc);

/// Serializes a resolved scenario back to config text (round-trips through
/// scenario_from_doc).
std::string scenario_to_text(const Scenario& sc);

}  // namespace preimpact
