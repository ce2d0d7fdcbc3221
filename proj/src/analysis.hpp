#pragma once

#include <optional>
#include <span>
#include <vector>

#include "controllers.hpp"
#include "trace.hpp"
#include "types.hpp"

namespace preimpact {

// ---------------------------------------------------------------------------
// Contact snapshot
// ---------------------------------------------------------------------------

/// State at the moment of first contact. sigma/nu are the first virtual
/// object's offset from the desired state, eta = nu + omega_a * sigma is kept
/// consistent by construction. x_c, v_c, a_c describe the plant.
struct ContactState {
  double sigma = 0.0;    // x_v(0) - x_d(0) [m]
  double nu = 0.0;       // v_v(0) - v_d(0) [m/s]
  double eta = 0.0;      // nu + omega_a * sigma [m/s]
  double omega_a = 1.0;  // admittance natural frequency the snapshot binds to
  double x_c = 0.0, v_c = 0.0, a_c = 0.0;

  static ContactState make(double sigma, double nu, double omega_a, double x_c = 0.0,
                           double v_c = 0.0, double a_c = 0.0) {
    return ContactState{sigma, nu, nu + omega_a * sigma, omega_a, x_c, v_c, a_c};
  }
};

// ---------------------------------------------------------------------------
// Closed-form transition analysis (critically damped admittance stage)
// ---------------------------------------------------------------------------

struct ClosedFormY {
  double y = 0.0;       // x_v - x_d
  double y_dot = 0.0;
  double y_ddot = 0.0;
};

/// Free response of the critically damped stage after contact:
///   y      = (eta*t + sigma) * exp(-omega_a*t)
///   y_dot  = (-omega_a*eta*t + nu) * exp(-omega_a*t)
///   y_ddot = [omega_a^2*eta*t - omega_a*(eta + nu)] * exp(-omega_a*t)
ClosedFormY closed_form_y(double t, const ContactState& c, double omega_a);

/// Guard used by entry points that receive full admittance parameters: the
/// closed forms only hold for zeta_a = 1.
void require_critical_damping(const SecondOrderParams& admittance);

/// Transition force term:
///   f_tra(t) = exp(-omega_a*t) * [(D*omega_a - K)*eta*t - D*nu - K*sigma].
double f_tra(double t, const ContactState& c, const SecondOrderParams& imp,
             double omega_a);

enum class TransitionKind {
  local_maximum,          // D*omega_a - K > 0; extremum always after contact
  no_extremum_smooth,     // D*omega_a - K < 0 and t_ex < 0
  local_minimum_possible, // D*omega_a - K < 0 and t_ex >= 0
  trivial_t_ex_infinite,  // D*omega_a == K
};

struct TransitionClass {
  TransitionKind kind = TransitionKind::no_extremum_smooth;
  std::optional<double> t_ex{};  // stationary time of f_tra when finite
};

/// Classifies the extremum of f_tra. Inputs with sigma, nu, eta all negative
/// are mirrored to the positive convention first; eta == 0 is degenerate.
///   t_ex = 1/omega_a + (D*nu + K*sigma) / ((D*omega_a - K) * eta)
TransitionClass t_extremum(const ContactState& c, const SecondOrderParams& imp,
                           double omega_a);

enum class SmoothVerdict { satisfied, violated_low, violated_high };

/// Smooth-transition condition: 2*zeta_i*omega_a < omega_i <= 4*zeta_i*omega_a.
/// The upper bound is conservative.
SmoothVerdict check_smooth_condition(double omega_i, double zeta_i, double omega_a);
SmoothVerdict check_smooth_condition(const SecondOrderParams& imp, double omega_a);

/// Admittance frequency range implied by the smooth condition:
/// [omega_i / (4*zeta_i), omega_i / (2*zeta_i)), lower inclusive.
struct OmegaRange {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double omega_a) const { return omega_a >= lower && omega_a < upper; }
};

OmegaRange design_omega_a_range(double omega_i, double zeta_i);
OmegaRange design_omega_a_range(const SecondOrderParams& imp);

/// Contact force at the instant of contact under each law:
///   full_feedforward: M*(a_c - a_d0) + M*omega_a*(eta + nu)
///   no_feedforward:   M*a_c
///   mi_equals_m:      m*a_c
double initial_contact_force(ImpedanceLaw law, const ContactState& c,
                             const SecondOrderParams& imp, double plant_mass,
                             double a_d0);

// ---------------------------------------------------------------------------
// Trace-level checks
// ---------------------------------------------------------------------------

/// Onset time from the trace gap column (linear interpolation).
std::optional<double> trace_contact_onset(const SimTrace& tr);

/// ContactState interpolated at the onset instant; throws NoContactError when
/// the trace has no contact. Uses the first stage's series for sigma/nu.
ContactState contact_state_at_onset(const SimTrace& tr, double omega_a);

/// Re-filters the recorded f_p through the admittance map and the recorded f_c
/// through the impedance map (zero initial state, same grid and stepping
/// scheme as the simulator) and returns max |x - x_d - resp_p - resp_c|.
/// Requires a single-stage trace from the full-feedforward law.
double superposition_check(const SimTrace& tr, const SecondOrderParams& adm,
                           const SecondOrderParams& imp);

/// f_tra reconstructed from the recorded first-stage offset:
/// -[D*(v_v1 - v_d) + K*(x_v1 - x_d)] with the terminal part's (D, K).
std::vector<double> extract_f_tra(const SimTrace& tr, const SecondOrderParams& terminal);

// ---------------------------------------------------------------------------
// Impact metrics
// ---------------------------------------------------------------------------

/// Peak contact-force magnitude; throws NoContactError when the trace never
/// makes contact.
double peak_contact_force(const SimTrace& tr);

struct ImpactStats {
  std::vector<double> peaks;
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1); 0 for a single trace
};

ImpactStats impact_stats(std::span<const SimTrace* const> traces);

/// 100 * (baseline_mean - case_mean) / baseline_mean.
double reduction_effect(double baseline_mean, double case_mean);

}  // namespace preimpact
