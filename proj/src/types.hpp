#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace preimpact {

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

/// Invalid configuration or input document. `line` is 0 when the error is not
/// tied to a location in a config file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Non-finite value produced while integrating. Carries the step index.
class IntegrationFault : public std::runtime_error {
 public:
  IntegrationFault(const std::string& what, std::size_t step)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A contact-dependent metric was requested on a trace without a contact event.
class NoContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate analysis input (e.g. eta == 0 in the extremum classification).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Kinematic state
// ---------------------------------------------------------------------------

/// Position / velocity / acceleration sample on the 1D axis. The acceleration
/// is always the most recently evaluated derivative consistent with the
/// equations of motion, never an integrated quantity.
struct MotionState {
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
};

// The plant, the desired trajectory and the virtual objects share the same
// kinematic layout; the aliases keep signatures readable.
using PlantState = MotionState;
using DesiredState = MotionState;
using VirtualObjectState = MotionState;

// ---------------------------------------------------------------------------
// Second-order control-part parameters
// ---------------------------------------------------------------------------

/// Desired inertia / viscosity / stiffness triple of one control part.
/// Construct through the factories so M, D, K stay positive; natural frequency
/// and damping ratio are derived on demand and therefore always consistent.
struct SecondOrderParams {
  double M = 1.0;  // inertia [kg]
  double D = 1.0;  // viscosity [N*s/m]
  double K = 1.0;  // stiffness [N/m]

  static SecondOrderParams from_mdk(double m, double d, double k) {
    SecondOrderParams p{m, d, k};
    p.validate();
    return p;
  }

  /// (M, omega, zeta) entry: D = 2*zeta*omega*M, K = omega^2*M.
  static SecondOrderParams from_natural(double m, double omega, double zeta) {
    SecondOrderParams p{m, 2.0 * zeta * omega * m, omega * omega * m};
    p.validate();
    return p;
  }

  double omega() const { return std::sqrt(K / M); }
  double zeta() const { return D / (2.0 * std::sqrt(M * K)); }

  void validate() const {
    if (!(M > 0.0) || !(D > 0.0) || !(K > 0.0) || !std::isfinite(M) ||
        !std::isfinite(D) || !std::isfinite(K)) {
      throw ConfigError("second-order parameters require M, D, K > 0");
    }
  }
};

}  // namespace preimpact
