#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "integrator.hpp"

namespace preimpact {

namespace {

double lerp_at(std::span<const double> t, std::span<const double> y, double ti) {
  // t is a uniform increasing grid.
  if (ti <= t.front()) return y.front();
  if (ti >= t.back()) return y.back();
  const double dt = t[1] - t[0];
  const std::size_t k = std::min(
      static_cast<std::size_t>((ti - t.front()) / dt), t.size() - 2);
  const double w = (ti - t[k]) / (t[k + 1] - t[k]);
  return y[k] + w * (y[k + 1] - y[k]);
}

}  // namespace

ClosedFormY closed_form_y(double t, const ContactState& c, double omega_a) {
  const double e = std::exp(-omega_a * t);
  ClosedFormY out;
  out.y = (c.eta * t + c.sigma) * e;
  out.y_dot = (-omega_a * c.eta * t + c.nu) * e;
  out.y_ddot = (omega_a * omega_a * c.eta * t - omega_a * (c.eta + c.nu)) * e;
  return out;
}

void require_critical_damping(const SecondOrderParams& admittance) {
  if (std::abs(admittance.zeta() - 1.0) > 1e-9) {
    throw ConfigError("transition analysis requires a critically damped admittance "
                      "part (zeta_a = 1)");
  }
}

double f_tra(double t, const ContactState& c, const SecondOrderParams& imp,
             double omega_a) {
  return std::exp(-omega_a * t) *
         ((imp.D * omega_a - imp.K) * c.eta * t - imp.D * c.nu - imp.K * c.sigma);
}

TransitionClass t_extremum(const ContactState& c, const SecondOrderParams& imp,
                           double omega_a) {
  double sigma = c.sigma;
  double nu = c.nu;
  double eta = c.eta;
  if (eta == 0.0) throw DegenerateInput("t_extremum requires eta != 0");
  if (eta < 0.0) {  // mirror to the positive convention
    sigma = -sigma;
    nu = -nu;
    eta = -eta;
  }
  const double slope = imp.D * omega_a - imp.K;
  TransitionClass out;
  if (std::abs(slope) <= 1e-12 * std::max(imp.D * omega_a, imp.K)) {
    out.kind = TransitionKind::trivial_t_ex_infinite;
    return out;
  }
  const double t_ex = 1.0 / omega_a + (imp.D * nu + imp.K * sigma) / (slope * eta);
  out.t_ex = t_ex;
  if (slope > 0.0) {
    out.kind = TransitionKind::local_maximum;
  } else if (t_ex < 0.0) {
    out.kind = TransitionKind::no_extremum_smooth;
    out.t_ex.reset();  // before contact; no extremum in t >= 0
  } else {
    out.kind = TransitionKind::local_minimum_possible;
  }
  return out;
}

SmoothVerdict check_smooth_condition(double omega_i, double zeta_i, double omega_a) {
  if (!(omega_i > 0.0) || !(zeta_i > 0.0) || !(omega_a > 0.0)) {
    throw ConfigError("smooth-condition check requires positive parameters");
  }
  if (omega_i <= 2.0 * zeta_i * omega_a) return SmoothVerdict::violated_low;
  if (omega_i > 4.0 * zeta_i * omega_a) return SmoothVerdict::violated_high;
  return SmoothVerdict::satisfied;
}

SmoothVerdict check_smooth_condition(const SecondOrderParams& imp, double omega_a) {
  return check_smooth_condition(imp.omega(), imp.zeta(), omega_a);
}

OmegaRange design_omega_a_range(double omega_i, double zeta_i) {
  if (!(omega_i > 0.0) || !(zeta_i > 0.0)) {
    throw ConfigError("design range requires positive parameters");
  }
  return OmegaRange{omega_i / (4.0 * zeta_i), omega_i / (2.0 * zeta_i)};
}

OmegaRange design_omega_a_range(const SecondOrderParams& imp) {
  return design_omega_a_range(imp.omega(), imp.zeta());
}

double initial_contact_force(ImpedanceLaw law, const ContactState& c,
                             const SecondOrderParams& imp, double plant_mass,
                             double a_d0) {
  switch (law) {
    case ImpedanceLaw::full_feedforward:
      return imp.M * (c.a_c - a_d0) + imp.M * c.omega_a * (c.eta + c.nu);
    case ImpedanceLaw::no_feedforward:
      return imp.M * c.a_c;
    case ImpedanceLaw::mi_equals_m:
      return plant_mass * c.a_c;
  }
  return 0.0;  // unreachable
}

std::optional<double> trace_contact_onset(const SimTrace& tr) {
  if (tr.size() == 0) return std::nullopt;
  return detect_contact_onset(tr.gap, tr.t.front(), tr.dt);
}

ContactState contact_state_at_onset(const SimTrace& tr, double omega_a) {
  const auto onset = trace_contact_onset(tr);
  if (!onset) throw NoContactError("trace has no contact event");
  const double ti = *onset;
  const double sigma =
      lerp_at(tr.t, tr.x_v[0], ti) - lerp_at(tr.t, tr.x_d, ti);
  const double nu = lerp_at(tr.t, tr.v_v[0], ti) - lerp_at(tr.t, tr.v_d, ti);
  const double x_c = lerp_at(tr.t, tr.x, ti);
  const double v_c = lerp_at(tr.t, tr.v, ti);
  const double a_c = lerp_at(tr.t, tr.a, ti);
  return ContactState::make(sigma, nu, omega_a, x_c, v_c, a_c);
}

double superposition_check(const SimTrace& tr, const SecondOrderParams& adm,
                           const SecondOrderParams& imp) {
  tr.validate();
  if (tr.stage_count != 1) {
    throw ConfigError("superposition check expects a single-stage trace");
  }
  if (tr.size() < 2) throw ConfigError("superposition check needs at least 2 samples");
  const double dt = tr.dt;

  // Zero-state responses on the trace grid with the recorded forces held over
  // each step, mirroring the simulator's stepping.
  double xp = 0.0, vp = 0.0, xc = 0.0, vc = 0.0;
  double residual = std::abs(tr.x[0] - tr.x_d[0]);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const double fp = tr.f_p[k];
    const double fc = tr.f_c[k];
    auto rk4 = [dt](double& pos, double& vel, double f, const SecondOrderParams& p) {
      auto acc = [&](double q, double qd) { return (f - p.D * qd - p.K * q) / p.M; };
      const double k1x = vel, k1v = acc(pos, vel);
      const double k2x = vel + 0.5 * dt * k1v, k2v = acc(pos + 0.5 * dt * k1x, vel + 0.5 * dt * k1v);
      const double k3x = vel + 0.5 * dt * k2v, k3v = acc(pos + 0.5 * dt * k2x, vel + 0.5 * dt * k2v);
      const double k4x = vel + dt * k3v, k4v = acc(pos + dt * k3x, vel + dt * k3v);
      pos += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      vel += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    };
    rk4(xp, vp, fp, adm);
    rk4(xc, vc, fc, imp);
    const double err = std::abs(tr.x[k + 1] - tr.x_d[k + 1] - xp - xc);
    residual = std::max(residual, err);
  }
  return residual;
}

std::vector<double> extract_f_tra(const SimTrace& tr, const SecondOrderParams& terminal) {
  std::vector<double> out(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out[k] = -(terminal.D * (tr.v_v[0][k] - tr.v_d[k]) +
               terminal.K * (tr.x_v[0][k] - tr.x_d[k]));
  }
  return out;
}

double peak_contact_force(const SimTrace& tr) {
  if (!trace_contact_onset(tr)) throw NoContactError("trace has no contact event");
  double peak = 0.0;
  for (double f : tr.f_c) peak = std::max(peak, std::abs(f));
  return peak;
}

ImpactStats impact_stats(std::span<const SimTrace* const> traces) {
  if (traces.empty()) throw NoContactError("impact metrics need at least one trace");
  ImpactStats stats;
  for (const SimTrace* tr : traces) stats.peaks.push_back(peak_contact_force(*tr));
  double sum = 0.0;
  for (double p : stats.peaks) sum += p;
  stats.mean = sum / static_cast<double>(stats.peaks.size());
  if (stats.peaks.size() > 1) {
    double ss = 0.0;
    for (double p : stats.peaks) ss += (p - stats.mean) * (p - stats.mean);
    stats.sd = std::sqrt(ss / static_cast<double>(stats.peaks.size() - 1));
  }
  return stats;
}

double reduction_effect(double baseline_mean, double case_mean) {
  if (!(baseline_mean > 0.0)) {
    throw ConfigError("reduction effect requires a positive baseline mean");
  }
  return 100.0 * (baseline_mean - case_mean) / baseline_mean;
}

}  // namespace preimpact
