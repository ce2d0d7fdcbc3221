#pragma once

#include <optional>
#include <vector>

#include "types.hpp"

namespace preimpact {

// ---------------------------------------------------------------------------
// Optical reflective proximity sensor model
// ---------------------------------------------------------------------------

/// xi = g_xi * alpha * psi / (d + d_offset)^n + residual_offset.
/// `residual_offset` models the leakage signal that survives calibration and
/// suppresses the force output at low reflectance; 0 keeps the model exact.
struct SensorParams {
  double g_xi = 1.0;            // transform coefficient of the sensing element
  double alpha = 1.0;           // reflectance of the detected surface, (0, 1]
  double psi = 1.0;             // emitted light energy
  double d_offset = 5e-3;       // offset distance [m]
  double n = 2.0;               // diffusion exponent
  double residual_offset = 0.0; // additive post-calibration leakage on xi

  void validate() const;
};

/// Sensor output for gap distance d >= 0. Throws std::domain_error for d < 0
/// (callers clamp the gap at contact).
double sensor_output(double d, const SensorParams& p);

// ---------------------------------------------------------------------------
// Virtual viscous force
// ---------------------------------------------------------------------------

struct VirtualForceGain {
  double g_p = 0.8;                         // scale coefficient [N*s]
  std::optional<double> saturation{};       // symmetric cap |f_p| <= value [N]

  void validate() const;
};

/// f_p = g_p * xi_dot / xi, clamped when a saturation cap is set. Returns
/// nullopt when xi <= 0 (sensor signal lost); callers substitute 0 and keep a
/// diagnostic. Scale-invariant: (c*xi, c*xi_dot) gives the same force.
std::optional<double> virtual_viscous_force(double xi, double xi_dot,
                                            const VirtualForceGain& gain);

/// Closed form of the same force in gap coordinates:
/// f_p = -g_p * n * d_dot / (d + d_offset). Zero at rest contact.
double virtual_force_closed_form(double d, double d_dot, double g_p, double n,
                                 double d_offset);

/// Backward difference (xi - xi_prev) / dt.
double xi_rate(double xi_prev, double xi, double dt);

/// Stateful wrapper returning 0 on the first sample.
class XiRate {
 public:
  double update(double xi, double dt);
  void reset() { has_prev_ = false; }

 private:
  bool has_prev_ = false;
  double prev_ = 0.0;
};

// ---------------------------------------------------------------------------
// Low-pass filter
// ---------------------------------------------------------------------------

struct FilterConfig {
  int order = 5;
  double cutoff_hz = 500.0;
  double sample_hz = 10000.0;
  bool enabled = true;

  void validate() const;  // cutoff < sample_hz / 2 when enabled
};

/// Discrete Butterworth low-pass, bilinear transform with prewarped cutoff,
/// realized as cascaded direct-form-II-transposed sections. Unit DC gain.
class ButterworthFilter {
 public:
  struct Section {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;  // numerator
    double a1 = 0.0, a2 = 0.0;            // denominator (a0 = 1)
    double z1 = 0.0, z2 = 0.0;            // state
  };

  /// Throws ConfigError when cutoff_hz >= sample_hz / 2 or order < 1.
  ButterworthFilter(int order, double cutoff_hz, double sample_hz);

  double step(double sample);

  /// Sets the internal state so a constant input `dc` passes through without
  /// a startup transient.
  void prime(double dc);

  const std::vector<Section>& sections() const { return sections_; }

 private:
  std::vector<Section> sections_;
};

}  // namespace preimpact
