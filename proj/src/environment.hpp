#pragma once

#include "types.hpp"

namespace preimpact {

// ---------------------------------------------------------------------------
// Penalty contact
// ---------------------------------------------------------------------------

/// Compression-only spring-damper. k_c default keeps the undamped contact
/// period short against the controller timescales while staying resolvable at
/// dt = 1e-4.
struct ContactModel {
  double k_c = 1e5;  // contact stiffness [N/m]
  double c_c = 50.0; // contact damping [N*s/m]

  void validate() const;
};

/// Non-negative penalty magnitude. gap > 0 means separated; the force is
/// clamped to compression (never adhesive). Callers apply the pair direction:
/// plant +, obstacle -.
double contact_force(double gap, double gap_rate, const ContactModel& m);

// ---------------------------------------------------------------------------
// Obstacle
// ---------------------------------------------------------------------------

struct ObstacleLaw {
  enum class Kind {
    approach_constant_velocity,  // velocity source until first contact, then
                                 // a free mass with optional Coulomb friction
    fixed,                       // never moves
  };

  Kind kind = Kind::approach_constant_velocity;
  double v0 = -0.3;     // approach velocity [m/s]
  double mass = 1.0;    // free-phase mass [kg]
  double f_fric = 0.0;  // Coulomb friction magnitude [N]

  void validate() const;
};

enum class ObstaclePhase { approach, free_mass };

struct ObstacleState {
  double x = 0.0;
  double v = 0.0;
  ObstaclePhase phase = ObstaclePhase::approach;
};

/// Acceleration under the law. `force_on_obstacle` is the world-frame contact
/// reaction. The approach phase is a velocity source (zero acceleration);
/// friction opposes motion with stiction below the threshold at rest.
double obstacle_accel(const ObstacleLaw& law, ObstaclePhase phase,
                      double force_on_obstacle, double v_obs);

/// Standalone one-step advance with the force held over the step (RK4 on the
/// free phase reduces to the exact constant-force update).
ObstacleState obstacle_step(const ObstacleLaw& law, double force_on_obstacle,
                            const ObstacleState& state, double dt);

// ---------------------------------------------------------------------------
// Minimum-jerk trajectory
// ---------------------------------------------------------------------------

/// Quintic 10-15-6 profile from x0 to xf over `duration`, starting at t0.
/// Clamped with zero velocity/acceleration outside [t0, t0 + duration].
struct MinJerkSpec {
  double x0 = 0.0;
  double xf = 0.1;
  double duration = 1.0;  // [s]
  double t0 = 0.0;        // [s]

  void validate() const;
};

DesiredState min_jerk(const MinJerkSpec& spec, double t);

}  // namespace preimpact
