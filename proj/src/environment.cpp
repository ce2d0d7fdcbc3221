#include "environment.hpp"

#include <algorithm>
#include <cmath>

namespace preimpact {

void ContactModel::validate() const {
  if (!(k_c > 0.0)) throw ConfigError("contact stiffness k_c must be > 0");
  if (!(c_c >= 0.0)) throw ConfigError("contact damping c_c must be >= 0");
}

double contact_force(double gap, double gap_rate, const ContactModel& m) {
  if (gap > 0.0) return 0.0;
  return std::max(0.0, m.k_c * (-gap) + m.c_c * (-gap_rate));
}

void ObstacleLaw::validate() const {
  if (!(mass > 0.0)) throw ConfigError("obstacle mass must be > 0");
  if (!(f_fric >= 0.0)) throw ConfigError("obstacle friction must be >= 0");
  if (!std::isfinite(v0)) throw ConfigError("obstacle approach velocity must be finite");
}

double obstacle_accel(const ObstacleLaw& law, ObstaclePhase phase,
                      double force_on_obstacle, double v_obs) {
  if (law.kind == ObstacleLaw::Kind::fixed) return 0.0;
  if (phase == ObstaclePhase::approach) return 0.0;  // velocity source
  double f = force_on_obstacle;
  if (law.f_fric > 0.0) {
    constexpr double kRestVel = 1e-9;
    if (std::abs(v_obs) < kRestVel) {
      if (std::abs(f) <= law.f_fric) return 0.0;  // stiction holds
      f -= law.f_fric * (f > 0.0 ? 1.0 : -1.0);
    } else {
      f -= law.f_fric * (v_obs > 0.0 ? 1.0 : -1.0);
    }
  }
  return f / law.mass;
}

ObstacleState obstacle_step(const ObstacleLaw& law, double force_on_obstacle,
                            const ObstacleState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("obstacle_step requires dt > 0");
  ObstacleState next = state;
  if (law.kind == ObstacleLaw::Kind::fixed) return next;
  if (state.phase == ObstaclePhase::approach) {
    next.v = law.v0;
    next.x = state.x + law.v0 * dt;
    return next;
  }
  const double a = obstacle_accel(law, state.phase, force_on_obstacle, state.v);
  // Constant acceleration over the step: exact update.
  next.x = state.x + state.v * dt + 0.5 * a * dt * dt;
  next.v = state.v + a * dt;
  return next;
}

void MinJerkSpec::validate() const {
  if (!(duration > 0.0)) throw ConfigError("trajectory duration must be > 0");
  if (!std::isfinite(x0) || !std::isfinite(xf) || !std::isfinite(t0)) {
    throw ConfigError("trajectory endpoints must be finite");
  }
}

DesiredState min_jerk(const MinJerkSpec& spec, double t) {
  DesiredState out;
  if (t <= spec.t0) {
    out.x = spec.x0;
    return out;
  }
  if (t >= spec.t0 + spec.duration) {
    out.x = spec.xf;
    return out;
  }
  const double T = spec.duration;
  const double tau = (t - spec.t0) / T;
  const double tau2 = tau * tau;
  const double tau3 = tau2 * tau;
  const double span = spec.xf - spec.x0;
  out.x = spec.x0 + span * (10.0 * tau3 - 15.0 * tau3 * tau + 6.0 * tau3 * tau2);
  out.v = span / T * (30.0 * tau2 - 60.0 * tau3 + 30.0 * tau2 * tau2);
  out.a = span / (T * T) * (60.0 * tau - 180.0 * tau2 + 120.0 * tau3);
  return out;
}

}  // namespace preimpact
