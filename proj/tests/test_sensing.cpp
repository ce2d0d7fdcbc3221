#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "sensing.hpp"

using namespace preimpact;

TEST_CASE("sensor_output: basic values and reflectance linearity") {
  SensorParams p;
  p.g_xi = 1.0;
  p.alpha = 1.0;
  p.psi = 1.0;
  p.d_offset = 1.0;
  p.n = 2.0;
  p.residual_offset = 0.0;

  CHECK(sensor_output(0.0, p) == doctest::Approx(1.0));
  CHECK(sensor_output(1.0, p) == doctest::Approx(0.25));  // 1/(1+1)^2

  // Halving alpha exactly halves xi at every distance.
  SensorParams half = p;
  half.alpha = 0.5;
  for (double d : {0.0, 0.003, 0.01, 0.5, 2.0}) {
    CHECK(sensor_output(d, half) == 0.5 * sensor_output(d, p));
  }

  CHECK_THROWS_AS(sensor_output(-1e-9, p), std::domain_error);

  // Strictly decreasing in d with no residual.
  double prev = sensor_output(0.0, p);
  for (double d = 0.01; d < 1.0; d += 0.01) {
    const double cur = sensor_output(d, p);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("SensorParams validation") {
  SensorParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.alpha = 1.0;
  p.d_offset = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.d_offset = 5e-3;
  p.residual_offset = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("virtual_viscous_force: ratio invariance, loss, saturation") {
  VirtualForceGain gain;
  gain.g_p = 0.8;

  CHECK(*virtual_viscous_force(2.0, 0.0, gain) == 0.0);

  const double f1 = *virtual_viscous_force(1.3, -0.7, gain);
  const double f2 = *virtual_viscous_force(2.6, -1.4, gain);
  CHECK(f1 == f2);  // (c*xi, c*xi_dot) is invariant

  CHECK(!virtual_viscous_force(0.0, 1.0, gain));
  CHECK(!virtual_viscous_force(-0.5, 1.0, gain));

  gain.saturation = 0.1;
  CHECK(*virtual_viscous_force(1.0, 10.0, gain) == 0.1);
  CHECK(*virtual_viscous_force(1.0, -10.0, gain) == -0.1);

  gain.saturation = 0.0;
  CHECK_THROWS_AS(gain.validate(), ConfigError);
}

TEST_CASE("virtual force: sensor-ratio path equals the closed form in gap coordinates") {
  // xi from the sensor model with an analytic xi_dot; the ratio must collapse
  // to -g_p*n*d_dot/(d + d_o) independently of g_xi, alpha, psi.
  SensorParams p;
  p.g_xi = 3.7;
  p.alpha = 0.42;
  p.psi = 1.9;
  p.d_offset = 5e-3;
  p.n = 2.0;
  VirtualForceGain gain;
  gain.g_p = 0.8;

  double max_diff = 0.0;
  for (double d = 0.0; d <= 0.1; d += 0.002) {
    for (double d_dot = -0.5; d_dot <= 0.5; d_dot += 0.05) {
      const double xi = sensor_output(d, p);
      const double xi_dot = -p.n * xi / (d + p.d_offset) * d_dot;
      const double via_ratio = *virtual_viscous_force(xi, xi_dot, gain);
      const double closed = virtual_force_closed_form(d, d_dot, gain.g_p, p.n, p.d_offset);
      max_diff = std::max(max_diff, std::abs(via_ratio - closed));
    }
  }
  CHECK(max_diff < 1e-12);
}

TEST_CASE("virtual_force_closed_form: rest contact, sign, far-field decay") {
  CHECK(virtual_force_closed_form(0.0, 0.0, 0.8, 2.0, 5e-3) == 0.0);
  CHECK(virtual_force_closed_form(0.01, -0.3, 0.8, 2.0, 5e-3) > 0.0);  // opposes approach
  CHECK(virtual_force_closed_form(0.01, 0.3, 0.8, 2.0, 5e-3) < 0.0);
  CHECK(std::abs(virtual_force_closed_form(1e6, 0.5, 0.8, 2.0, 5e-3)) < 1e-6);
}

TEST_CASE("virtual force: residual offset attenuates the force on a fixed trajectory") {
  SensorParams clean;
  SensorParams leaky = clean;
  leaky.residual_offset = 50.0;
  VirtualForceGain gain;
  gain.g_p = 0.8;

  for (double d = 0.001; d <= 0.05; d += 0.004) {
    const double d_dot = -0.3;
    auto f_with = [&](const SensorParams& p) {
      const double xi0 = p.g_xi * p.alpha * p.psi / std::pow(d + p.d_offset, p.n);
      const double xi_dot = -p.n * xi0 / (d + p.d_offset) * d_dot;
      return *virtual_viscous_force(sensor_output(d, p), xi_dot, gain);
    };
    CHECK(std::abs(f_with(leaky)) < std::abs(f_with(clean)));
  }
}

TEST_CASE("xi_rate: constant, ramp, exponential") {
  XiRate rate;
  CHECK(rate.update(5.0, 1e-4) == 0.0);  // first sample
  CHECK(rate.update(5.0, 1e-4) == 0.0);  // constant input

  XiRate ramp;
  ramp.update(0.0, 1e-4);
  CHECK(ramp.update(3.0e-4, 1e-4) == doctest::Approx(3.0).epsilon(1e-12));

  // xi = exp(-t): backward difference approximates -xi within O(dt).
  XiRate decay;
  const double dt = 1e-4;
  double worst = 0.0;
  decay.update(1.0, dt);
  for (int k = 1; k <= 1000; ++k) {
    const double t = k * dt;
    const double xi = std::exp(-t);
    const double est = decay.update(xi, dt);
    worst = std::max(worst, std::abs(est - (-xi)) / xi);
  }
  CHECK(worst < 1e-3);

  CHECK_THROWS_AS(xi_rate(1.0, 2.0, 0.0), ConfigError);
}

namespace {

/// Independent oracle: full-order Butterworth transfer function via polynomial
/// expansion of the analog denominator followed by a bilinear substitution.
struct PolyFilter {
  std::vector<double> b, a;  // z^-1 polynomials, a[0] = 1

  static PolyFilter design(int order, double cutoff_hz, double sample_hz) {
    const double w = 2.0 * sample_hz *
                     std::tan(std::numbers::pi * cutoff_hz / sample_hz);
    // Analog denominator coefficients, ascending powers of s.
    std::vector<double> den{1.0};
    auto mul = [](const std::vector<double>& p, const std::vector<double>& q) {
      std::vector<double> r(p.size() + q.size() - 1, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
      return r;
    };
    for (int k = 1; k <= order / 2; ++k) {
      const double theta = std::numbers::pi * (2.0 * k - 1.0) / (2.0 * order);
      den = mul(den, {w * w, 2.0 * std::sin(theta) * w, 1.0});
    }
    if (order % 2 == 1) den = mul(den, {w, 1.0});

    // s = K (1 - z)/(1 + z) with z meaning z^-1:
    // A(z) = sum_k den[k] K^k (1-z)^k (1+z)^(order-k).
    const double big_k = 2.0 * sample_hz;
    auto binom_pow = [&mul](std::vector<double> base, int p) {
      std::vector<double> r{1.0};
      for (int i = 0; i < p; ++i) r = mul(r, base);
      return r;
    };
    PolyFilter out;
    out.a.assign(order + 1, 0.0);
    double kpow = 1.0;
    for (int k = 0; k <= order; ++k) {
      const auto term = mul(binom_pow({1.0, -1.0}, k), binom_pow({1.0, 1.0}, order - k));
      for (int i = 0; i <= order; ++i) out.a[i] += den[k] * kpow * term[i];
      kpow *= big_k;
    }
    const auto num = binom_pow({1.0, 1.0}, order);
    out.b.assign(order + 1, 0.0);
    const double gain = std::pow(w, order);
    for (int i = 0; i <= order; ++i) out.b[i] = gain * num[i];
    const double a0 = out.a[0];
    for (auto& c : out.a) c /= a0;
    for (auto& c : out.b) c /= a0;
    return out;
  }

  std::complex<double> response(double omega) const {  // omega in rad/sample
    const std::complex<double> z = std::exp(std::complex<double>(0.0, -omega));
    std::complex<double> num = 0.0, den = 0.0, zp = 1.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      num += b[i] * zp;
      den += a[i] * zp;
      zp *= z;
    }
    return num / den;
  }
};

std::complex<double> cascade_response(const ButterworthFilter& f, double omega) {
  const std::complex<double> z = std::exp(std::complex<double>(0.0, -omega));
  std::complex<double> h = 1.0;
  for (const auto& s : f.sections()) {
    h *= (s.b0 + s.b1 * z + s.b2 * z * z) / (1.0 + s.a1 * z + s.a2 * z * z);
  }
  return h;
}

}  // namespace

TEST_CASE("ButterworthFilter: matches the polynomial bilinear-transform oracle") {
  const int order = 5;
  const double cutoff = 500.0, fs = 10000.0;
  ButterworthFilter filt(order, cutoff, fs);
  const PolyFilter oracle = PolyFilter::design(order, cutoff, fs);

  for (double hz = 10.0; hz < 4900.0; hz *= 1.35) {
    const double omega = 2.0 * std::numbers::pi * hz / fs;
    const auto diff = cascade_response(filt, omega) - oracle.response(omega);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("ButterworthFilter: unit DC gain on a constant input") {
  ButterworthFilter filt(5, 500.0, 10000.0);
  double y = 0.0;
  const double c = 3.25;
  for (int k = 0; k < 400; ++k) y = filt.step(c);  // 40 ms >> 10/cutoff
  CHECK(std::abs(y - c) < 1e-9);
}

TEST_CASE("ButterworthFilter: -3 dB at the cutoff frequency") {
  const double fs = 10000.0, fc = 500.0;
  ButterworthFilter filt(5, fc, fs);
  const int n = 2000;  // 0.2 s
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = filt.step(std::sin(2.0 * std::numbers::pi * fc * k / fs));
  }
  // Amplitude from the RMS of the last 20 full cycles (20 samples per cycle).
  double ss = 0.0;
  const int tail = 400;
  for (int k = n - tail; k < n; ++k) ss += out[k] * out[k];
  const double amplitude = std::sqrt(2.0 * ss / tail);
  CHECK(amplitude == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("ButterworthFilter: prime removes the startup transient") {
  ButterworthFilter filt(5, 500.0, 10000.0);
  filt.prime(2.0);
  for (int k = 0; k < 10; ++k) {
    CHECK(filt.step(2.0) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("FilterConfig: cutoff at or above Nyquist is rejected") {
  CHECK_THROWS_AS(ButterworthFilter(5, 5000.0, 10000.0), ConfigError);
  CHECK_THROWS_AS(ButterworthFilter(5, 500.0, 1000.0), ConfigError);
  CHECK_THROWS_AS(ButterworthFilter(0, 100.0, 10000.0), ConfigError);
  FilterConfig cfg;
  cfg.enabled = false;
  cfg.cutoff_hz = -1.0;  // ignored while disabled
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("ButterworthFilter: linearity supports exact reflectance scaling") {
  ButterworthFilter f1(5, 500.0, 10000.0);
  ButterworthFilter f2(5, 500.0, 10000.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 0.37;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double x = u(rng);
    const double y1 = f1.step(x);
    const double y2 = f2.step(c * x);
    worst = std::max(worst, std::abs(y2 - c * y1));
  }
  CHECK(worst < 1e-12);
}
