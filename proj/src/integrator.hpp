#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "types.hpp"

namespace preimpact {

enum class IntegratorMethod { rk4, semi_implicit_euler };

/// Fixed-step integration settings. The state layout is (position, velocity)
/// pairs, which the semi-implicit method relies on.
struct IntegratorConfig {
  double dt = 1e-4;
  IntegratorMethod method = IntegratorMethod::rk4;
  double t_end = 2.5;

  /// Number of steps; t_end must be an integer multiple of dt (within 1e-9
  /// relative slack to absorb decimal rounding).
  std::size_t step_count() const;
  void validate() const;
};

/// dydt = f(t, y). Must be side-effect free; the integrator may evaluate it at
/// intermediate states that are never part of the trajectory.
using DerivFn = std::function<void(double t, std::span<const double> y,
                                   std::span<double> dydt)>;

/// Advances `y` by one step. Throws IntegrationFault tagged with `step_index`
/// if the derivative or the result is non-finite.
std::vector<double> integrate_step(const DerivFn& f, std::span<const double> y,
                                   double t, double dt, IntegratorMethod method,
                                   std::size_t step_index = 0);

/// Reusable fixed-dimension stepper; owns the stage buffers so the hot loop
/// does not allocate.
class Integrator {
 public:
  Integrator(IntegratorMethod method, std::size_t dim);

  /// In-place step of `y` (size dim). Throws IntegrationFault on non-finite
  /// values, tagged with `step_index`.
  template <class F>
  void step(F&& f, double t, double dt, std::span<double> y, std::size_t step_index);

  IntegratorMethod method() const { return method_; }

 private:
  static void check_finite(std::span<const double> v, std::size_t step_index);

  IntegratorMethod method_;
  std::size_t dim_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

template <class F>
void Integrator::step(F&& f, double t, double dt, std::span<double> y,
                      std::size_t step_index) {
  const std::size_t n = dim_;
  if (method_ == IntegratorMethod::rk4) {
    f(t, std::span<const double>(y), std::span<double>(k1_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    f(t + 0.5 * dt, std::span<const double>(tmp_), std::span<double>(k2_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    f(t + 0.5 * dt, std::span<const double>(tmp_), std::span<double>(k3_));
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    f(t + dt, std::span<const double>(tmp_), std::span<double>(k4_));
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  } else {
    // Velocities first from the accelerations at the current state, then
    // positions with the updated velocities. For a (position, velocity) pair
    // the position slope equals the stored velocity, so the update below is
    // x += dt * v_new.
    f(t, std::span<const double>(y), std::span<double>(k1_));
    for (std::size_t i = 0; i + 1 < n; i += 2) {
      y[i + 1] += dt * k1_[i + 1];
      y[i] += dt * (k1_[i] + dt * k1_[i + 1]);
    }
  }
  check_finite(std::span<const double>(y), step_index);
}

/// First time the gap series crosses from positive to non-positive, linearly
/// interpolated between samples; nullopt when the gap stays positive. A series
/// that starts non-positive reports t0.
std::optional<double> detect_contact_onset(std::span<const double> gap, double t0,
                                           double dt);

}  // namespace preimpact
