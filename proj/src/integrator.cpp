#include "integrator.hpp"

namespace preimpact {

std::size_t IntegratorConfig::step_count() const {
  validate();
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  return static_cast<std::size_t>(rounded);
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) {
    throw ConfigError("integrator t_end must be >= dt");
  }
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError("t_end must be an integer multiple of dt");
  }
}

Integrator::Integrator(IntegratorMethod method, std::size_t dim)
    : method_(method), dim_(dim), k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

void Integrator::check_finite(std::span<const double> v, std::size_t step_index) {
  for (double x : v) {
    if (!std::isfinite(x)) throw IntegrationFault("non-finite state", step_index);
  }
}

std::vector<double> integrate_step(const DerivFn& f, std::span<const double> y,
                                   double t, double dt, IntegratorMethod method,
                                   std::size_t step_index) {
  if (!(dt > 0.0)) throw ConfigError("integrate_step requires dt > 0");
  Integrator integ(method, y.size());
  std::vector<double> out(y.begin(), y.end());
  integ.step(f, t, dt, std::span<double>(out), step_index);
  return out;
}

std::optional<double> detect_contact_onset(std::span<const double> gap, double t0,
                                           double dt) {
  if (gap.empty()) return std::nullopt;
  if (gap[0] <= 0.0) return t0;
  for (std::size_t k = 0; k + 1 < gap.size(); ++k) {
    if (gap[k] > 0.0 && gap[k + 1] <= 0.0) {
      const double frac = gap[k] / (gap[k] - gap[k + 1]);
      return t0 + (static_cast<double>(k) + frac) * dt;
    }
  }
  return std::nullopt;
}

}  // namespace preimpact
