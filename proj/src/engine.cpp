#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace preimpact {

namespace {

struct StateLayout {
  // [x, v, (x_v, v_v) per stage, x_obs, v_obs]
  std::size_t stages;
  std::size_t dim() const { return 4 + 2 * stages; }
  std::size_t stage_x(std::size_t k) const { return 2 + 2 * k; }
  std::size_t stage_v(std::size_t k) const { return 3 + 2 * k; }
  std::size_t obs_x() const { return 2 + 2 * stages; }
  std::size_t obs_v() const { return 3 + 2 * stages; }
};

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  sc.validate();

  const std::size_t n_steps = sc.integrator.step_count();
  const double dt = sc.integrator.dt;
  const std::size_t n_stages = sc.controller.stage_count();
  const StateLayout layout{n_stages};
  const double n_hat = sc.contact_normal;
  const double m = sc.plant_mass;

  RunResult result;
  SimTrace& tr = result.trace;
  tr.dt = dt;
  tr.stage_count = n_stages;
  tr.reserve(n_steps + 1);

  // Initial state: the plant and every virtual object start on the desired
  // trajectory; the first stage takes the optional verification offset.
  const DesiredState des0 = sc.trajectory.at(0.0);
  std::vector<double> y(layout.dim(), 0.0);
  y[0] = des0.x;
  y[1] = des0.v;
  for (std::size_t k = 0; k < n_stages; ++k) {
    y[layout.stage_x(k)] = des0.x + (k == 0 ? sc.init_sigma : 0.0);
    y[layout.stage_v(k)] = des0.v + (k == 0 ? sc.init_nu : 0.0);
  }
  y[layout.obs_x()] = sc.obstacle_x0;
  y[layout.obs_v()] =
      sc.obstacle_law.kind == ObstacleLaw::Kind::approach_constant_velocity
          ? sc.obstacle_law.v0
          : 0.0;

  std::optional<ButterworthFilter> filter;
  if (sc.filter.enabled) {
    filter.emplace(sc.filter.order, sc.filter.cutoff_hz, 1.0 / dt);
  }
  XiRate rate;
  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  ObstaclePhase phase = ObstaclePhase::approach;
  Integrator integ(sc.integrator.method, layout.dim());

  const std::size_t hold_steps =
      sc.control_hold
          ? static_cast<std::size_t>(std::round(sc.control_dt / dt))
          : 1;

  double f_p_world = 0.0;
  double u_frozen = 0.0;
  std::vector<MotionState> stage_buf(n_stages);
  std::vector<double> accel_buf(n_stages);

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const DesiredState des = sc.trajectory.at(t);

    const double gap = n_hat * (y[0] - y[layout.obs_x()]);
    const double gap_rate = n_hat * (y[1] - y[layout.obs_v()]);
    const double d = std::max(gap, 0.0);

    double xi = sensor_output(d, sc.sensor);
    if (sc.noise_std > 0.0) xi += sc.noise_std * noise(rng);
    if (filter) {
      if (k == 0) filter->prime(xi);
      xi = filter->step(xi);
    }
    const double xi_dot = rate.update(xi, dt);

    if (k % hold_steps == 0) {
      const auto f_p = virtual_viscous_force(xi, xi_dot, sc.gain);
      if (!f_p) {
        f_p_world = 0.0;
        ++result.diags.sensor_signal_lost;
      } else {
        if (sc.gain.saturation &&
            std::abs(*f_p) >= *sc.gain.saturation &&
            std::abs(xi_dot) > 0.0) {
          ++result.diags.saturation_hits;
        }
        f_p_world = n_hat * *f_p;
      }
    }

    const double f_c_world = n_hat * contact_force(gap, gap_rate, sc.contact);

    if (phase == ObstaclePhase::approach && gap <= 0.0 &&
        sc.obstacle_law.kind == ObstacleLaw::Kind::approach_constant_velocity) {
      phase = ObstaclePhase::free_mass;
      result.diags.obstacle_release_time = t;
    }

    const ChainSignals signals{f_p_world, f_c_world};

    // Control force and stage accelerations at the sample.
    for (std::size_t s = 0; s < n_stages; ++s) {
      stage_buf[s] = {y[layout.stage_x(s)], y[layout.stage_v(s)], 0.0};
    }
    const PlantState plant_now{y[0], y[1], 0.0};
    const double u_now = chain_eval(sc.controller, des, stage_buf, plant_now, signals,
                                    m, accel_buf);
    if (sc.control_hold && k % hold_steps == 0) u_frozen = u_now;
    const double u_rec = sc.control_hold ? u_frozen : u_now;

    tr.t.push_back(t);
    tr.x_d.push_back(des.x);
    tr.v_d.push_back(des.v);
    tr.a_d.push_back(des.a);
    for (std::size_t s = 0; s < n_stages; ++s) {
      tr.x_v[s].push_back(y[layout.stage_x(s)]);
      tr.v_v[s].push_back(y[layout.stage_v(s)]);
    }
    tr.x.push_back(y[0]);
    tr.v.push_back(y[1]);
    tr.a.push_back((u_rec + f_c_world) / m);
    tr.x_obs.push_back(y[layout.obs_x()]);
    tr.v_obs.push_back(y[layout.obs_v()]);
    tr.gap.push_back(gap);
    tr.xi.push_back(xi);
    tr.f_p.push_back(f_p_world);
    tr.f_c.push_back(f_c_world);
    tr.u.push_back(u_rec);

    if (k == n_steps) break;

    auto rhs = [&](double tau, std::span<const double> s, std::span<double> ds) {
      const DesiredState des_tau = sc.trajectory.at(tau);
      for (std::size_t i = 0; i < n_stages; ++i) {
        stage_buf[i] = {s[layout.stage_x(i)], s[layout.stage_v(i)], 0.0};
      }
      const PlantState plant{s[0], s[1], 0.0};
      const double u_stage = chain_eval(sc.controller, des_tau, stage_buf, plant,
                                        signals, m, accel_buf);
      const double u = sc.control_hold ? u_frozen : u_stage;
      ds[0] = s[1];
      ds[1] = (u + f_c_world) / m;
      for (std::size_t i = 0; i < n_stages; ++i) {
        ds[layout.stage_x(i)] = s[layout.stage_v(i)];
        ds[layout.stage_v(i)] = accel_buf[i];
      }
      ds[layout.obs_x()] = s[layout.obs_v()];
      ds[layout.obs_v()] =
          obstacle_accel(sc.obstacle_law, phase, -f_c_world, s[layout.obs_v()]);
    };
    integ.step(rhs, t, dt, y, k);
  }

  tr.validate();
  return result;
}

}  // namespace preimpact
