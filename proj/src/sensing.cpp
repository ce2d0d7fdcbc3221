#include "sensing.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace preimpact {

void SensorParams::validate() const {
  if (!(g_xi > 0.0) || !(psi > 0.0) || !(d_offset > 0.0) || !(n > 0.0)) {
    throw ConfigError("sensor parameters g_xi, psi, d_offset, n must be > 0");
  }
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw ConfigError("sensor reflectance alpha must be in (0, 1]");
  }
  if (!(residual_offset >= 0.0)) {
    throw ConfigError("sensor residual_offset must be >= 0");
  }
}

double sensor_output(double d, const SensorParams& p) {
  if (d < 0.0) throw std::domain_error("sensor gap distance must be >= 0");
  return p.g_xi * p.alpha * p.psi / std::pow(d + p.d_offset, p.n) + p.residual_offset;
}

void VirtualForceGain::validate() const {
  if (!(g_p >= 0.0)) throw ConfigError("gain g_p must be >= 0");
  if (saturation && !(*saturation > 0.0)) {
    throw ConfigError("force saturation cap must be > 0");
  }
}

std::optional<double> virtual_viscous_force(double xi, double xi_dot,
                                            const VirtualForceGain& gain) {
  if (!(xi > 0.0)) return std::nullopt;
  double f = gain.g_p * xi_dot / xi;
  if (gain.saturation) {
    const double cap = *gain.saturation;
    if (f > cap) f = cap;
    if (f < -cap) f = -cap;
  }
  return f;
}

double virtual_force_closed_form(double d, double d_dot, double g_p, double n,
                                 double d_offset) {
  return -g_p * n * d_dot / (d + d_offset);
}

double xi_rate(double xi_prev, double xi, double dt) {
  if (!(dt > 0.0)) throw ConfigError("xi_rate requires dt > 0");
  return (xi - xi_prev) / dt;
}

double XiRate::update(double xi, double dt) {
  if (!has_prev_) {
    has_prev_ = true;
    prev_ = xi;
    return 0.0;
  }
  const double rate = xi_rate(prev_, xi, dt);
  prev_ = xi;
  return rate;
}

void FilterConfig::validate() const {
  if (!enabled) return;
  if (order < 1 || order > 12) throw ConfigError("filter order must be in [1, 12]");
  if (!(sample_hz > 0.0)) throw ConfigError("filter sample rate must be > 0");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_hz)) {
    throw ConfigError("filter cutoff must satisfy 0 < cutoff < sample_hz / 2");
  }
}

ButterworthFilter::ButterworthFilter(int order, double cutoff_hz, double sample_hz) {
  FilterConfig cfg{order, cutoff_hz, sample_hz, true};
  cfg.validate();

  // Analog prototype poles on the circle of radius w (prewarped cutoff),
  // discretized section by section with the bilinear transform.
  const double w = 2.0 * sample_hz * std::tan(std::numbers::pi * cutoff_hz / sample_hz);
  const double big_k = 2.0 * sample_hz;

  const int pairs = order / 2;
  for (int k = 1; k <= pairs; ++k) {
    // Conjugate pair: s^2 + 2*sin(theta)*w*s + w^2 with theta the pole angle
    // measured from the imaginary axis.
    const double theta = std::numbers::pi * (2.0 * k - 1.0) / (2.0 * order);
    const double c = 2.0 * std::sin(theta) * w;
    const double d0 = big_k * big_k + c * big_k + w * w;
    Section s;
    s.b0 = w * w / d0;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = (2.0 * w * w - 2.0 * big_k * big_k) / d0;
    s.a2 = (big_k * big_k - c * big_k + w * w) / d0;
    sections_.push_back(s);
  }
  if (order % 2 == 1) {
    // Real pole: w / (s + w).
    const double d0 = big_k + w;
    Section s;
    s.b0 = w / d0;
    s.b1 = s.b0;
    s.b2 = 0.0;
    s.a1 = (w - big_k) / d0;
    s.a2 = 0.0;
    sections_.push_back(s);
  }
}

double ButterworthFilter::step(double sample) {
  double x = sample;
  for (Section& s : sections_) {
    const double y = s.b0 * x + s.z1;
    s.z1 = s.b1 * x - s.a1 * y + s.z2;
    s.z2 = s.b2 * x - s.a2 * y;
    x = y;
  }
  return x;
}

void ButterworthFilter::prime(double dc) {
  // Steady state for constant input: every section outputs dc (unit DC gain).
  for (Section& s : sections_) {
    s.z2 = s.b2 * dc - s.a2 * dc;
    s.z1 = s.b1 * dc - s.a1 * dc + s.z2;
  }
}

}  // namespace preimpact
