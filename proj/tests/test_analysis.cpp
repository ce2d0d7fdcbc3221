#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "analysis.hpp"
#include "test_support.hpp"

using namespace preimpact;
using preimpact::testing::oracle_rk4_step;

TEST_CASE("closed_form_y: values at t = 0 and the zero solution") {
  const double omega = 7.0;
  const auto c = ContactState::make(0.03, 0.2, omega);
  const auto at0 = closed_form_y(0.0, c, omega);
  CHECK(at0.y == doctest::Approx(c.sigma));
  CHECK(at0.y_dot == doctest::Approx(c.nu));
  CHECK(at0.y_ddot == doctest::Approx(-omega * (c.eta + c.nu)));

  const auto zero = ContactState::make(0.0, 0.0, omega);
  for (double t : {0.0, 0.1, 1.0, 5.0}) {
    CHECK(closed_form_y(t, zero, omega).y == 0.0);
  }
}

TEST_CASE("closed_form_y: matches an independent RK4 integration of the stage ODE") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double omega = 2.0 + 18.0 * std::abs(u(rng));
    const double sigma = 0.1 * u(rng);
    const double nu = 0.5 * u(rng);
    const auto c = ContactState::make(sigma, nu, omega);

    double y = sigma, yd = nu;
    const double dt = 1e-5;
    const int steps = static_cast<int>(10.0 / omega / dt);
    double max_err = 0.0;
    for (int k = 0; k < steps; ++k) {
      oracle_rk4_step(
          [&](double, double q, double qd) {
            return -2.0 * omega * qd - omega * omega * q;
          },
          y, yd, 0.0, dt);
      const auto ref = closed_form_y((k + 1) * dt, c, omega);
      max_err = std::max(max_err, std::abs(y - ref.y));
    }
    CHECK(max_err < 1e-9);
  }
}

TEST_CASE("closed_form_y derivatives are consistent (finite differences)") {
  const double omega = 9.0;
  const auto c = ContactState::make(0.05, 0.3, omega);
  const double h = 1e-6;
  for (double t = 0.0; t < 2.0; t += 0.13) {
    const auto lo = closed_form_y(t, c, omega);
    const auto hi = closed_form_y(t + h, c, omega);
    const auto mid = closed_form_y(t + 0.5 * h, c, omega);
    CHECK((hi.y - lo.y) / h == doctest::Approx(mid.y_dot).epsilon(1e-6));
    CHECK((hi.y_dot - lo.y_dot) / h == doctest::Approx(mid.y_ddot).epsilon(1e-6));
  }
}

TEST_CASE("require_critical_damping rejects zeta != 1") {
  CHECK_NOTHROW(require_critical_damping(SecondOrderParams::from_natural(1.0, 5.0, 1.0)));
  CHECK_THROWS_AS(
      require_critical_damping(SecondOrderParams::from_natural(1.0, 5.0, 0.9)),
      ConfigError);
}

TEST_CASE("f_tra: initial value, decay, and the documented sign case") {
  const auto imp = SecondOrderParams::from_natural(0.5, 15.0, 1.0);
  const double omega_a = 5.0;
  const auto c = ContactState::make(0.02, 0.15, omega_a);

  CHECK(f_tra(0.0, c, imp, omega_a) ==
        doctest::Approx(-imp.D * c.nu - imp.K * c.sigma));
  CHECK(std::abs(f_tra(10.0 / omega_a, c, imp, omega_a)) <
        1e-3 * std::abs(f_tra(0.0, c, imp, omega_a)));

  // sigma = 0.05, nu = 0.3, omega_a = 10, zeta_i = 1: negative at contact.
  const auto c2 = ContactState::make(0.05, 0.3, 10.0);
  for (double omega_i : {5.0, 15.0, 30.0, 45.0}) {
    const auto imp2 = SecondOrderParams::from_natural(0.5, omega_i, 1.0);
    CHECK(f_tra(0.0, c2, imp2, 10.0) < 0.0);
  }
}

TEST_CASE("f_tra equals the transition term reconstructed from the closed form") {
  const auto imp = SecondOrderParams::from_natural(0.5, 12.0, 1.0);
  const double omega_a = 5.0;
  const auto c = ContactState::make(0.03, 0.22, omega_a);
  for (double t = 0.0; t < 2.0; t += 0.01) {
    const auto y = closed_form_y(t, c, omega_a);
    const double reconstructed = -(imp.D * y.y_dot + imp.K * y.y);
    CHECK(std::abs(f_tra(t, c, imp, omega_a) - reconstructed) < 1e-10);
  }
}

namespace {

/// Brute-force extremum scan of f_tra on [0, horizon] with a 1e-5 s grid.
struct ScanResult {
  double t_max = 0.0, v_max = -1e300;
  double t_min = 0.0, v_min = 1e300;
};

ScanResult scan_f_tra(const ContactState& c, const SecondOrderParams& imp,
                      double omega_a, double horizon) {
  ScanResult r;
  for (double t = 0.0; t <= horizon; t += 1e-5) {
    const double v = f_tra(t, c, imp, omega_a);
    if (v > r.v_max) {
      r.v_max = v;
      r.t_max = t;
    }
    if (v < r.v_min) {
      r.v_min = v;
      r.t_min = t;
    }
  }
  return r;
}

}  // namespace

TEST_CASE("t_extremum: documented cases") {
  // omega_i < 2*zeta_i*omega_a: always a local maximum after contact.
  const auto soft = SecondOrderParams::from_natural(0.5, 5.0, 1.0);
  const auto c = ContactState::make(0.05, 0.3, 10.0);
  const auto cls = t_extremum(c, soft, 10.0);
  CHECK(cls.kind == TransitionKind::local_maximum);
  REQUIRE(cls.t_ex);
  CHECK(*cls.t_ex > 0.0);

  // D*omega_a == K: trivial infinite stationary time.
  const auto balanced = SecondOrderParams::from_mdk(0.5, 10.0, 10.0 * 1.0);
  CHECK(t_extremum(c, balanced, 1.0).kind == TransitionKind::trivial_t_ex_infinite);

  // eta == 0 is degenerate.
  const auto degenerate = ContactState::make(0.05, -0.5, 10.0);  // nu = -omega*sigma
  CHECK(degenerate.eta == doctest::Approx(0.0));
  CHECK_THROWS_AS(t_extremum(degenerate, soft, 10.0), DegenerateInput);
}

TEST_CASE("t_extremum: classification agrees with dense sampling for random draws") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    const double omega_a = 3.0 + 17.0 * u(rng);
    const double zeta_i = 0.4 + 1.2 * u(rng);
    const double omega_i = omega_a * (0.4 + 5.0 * u(rng));
    const double sigma = 0.01 + 0.1 * u(rng);
    const double nu = 0.05 + 0.5 * u(rng);
    const auto imp = SecondOrderParams::from_natural(0.5, omega_i, zeta_i);
    const auto c = ContactState::make(sigma, nu, omega_a);

    const auto cls = t_extremum(c, imp, omega_a);
    if (cls.kind == TransitionKind::trivial_t_ex_infinite) continue;
    const double horizon = 10.0 / omega_a;
    if (cls.t_ex && (*cls.t_ex > 0.8 * horizon || *cls.t_ex < 1e-4)) continue;
    const auto scan = scan_f_tra(c, imp, omega_a, horizon);
    const double f0 = f_tra(0.0, c, imp, omega_a);

    switch (cls.kind) {
      case TransitionKind::local_maximum:
        // The sampled maximum exceeds both endpoints and sits at t_ex.
        CHECK(scan.v_max > std::max(f0, 0.0) - 1e-12);
        CHECK(std::abs(scan.t_max - *cls.t_ex) < 2e-5);
        break;
      case TransitionKind::local_minimum_possible:
        CHECK(scan.v_min < std::min(f0, 0.0) + 1e-12);
        CHECK(std::abs(scan.t_min - *cls.t_ex) < 2e-5);
        break;
      case TransitionKind::no_extremum_smooth: {
        // Monotone between f_tra(0) and 0: every sample inside the range.
        const double lo = std::min(f0, 0.0) - 1e-12;
        const double hi = std::max(f0, 0.0) + 1e-12;
        CHECK(scan.v_min >= lo);
        CHECK(scan.v_max <= hi);
        break;
      }
      default:
        break;
    }
    ++checked;
  }
}

TEST_CASE("t_extremum: mirrored negative-sign situations classify identically") {
  const auto imp = SecondOrderParams::from_natural(0.5, 15.0, 1.0);
  const double omega_a = 5.0;
  const auto pos = ContactState::make(0.04, 0.25, omega_a);
  const auto neg = ContactState::make(-0.04, -0.25, omega_a);
  const auto a = t_extremum(pos, imp, omega_a);
  const auto b = t_extremum(neg, imp, omega_a);
  CHECK(a.kind == b.kind);
  if (a.t_ex && b.t_ex) CHECK(*a.t_ex == doctest::Approx(*b.t_ex));
}

TEST_CASE("sign law: curvature at t_ex is -sgn(D*omega_a - K)") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 1000) {
    const double omega_a = 2.0 + 20.0 * u(rng);
    const double zeta_i = 0.3 + 1.5 * u(rng);
    const double omega_i = omega_a * (0.3 + 4.0 * u(rng));
    const auto imp = SecondOrderParams::from_natural(0.4 + u(rng), omega_i, zeta_i);
    const auto c = ContactState::make(0.01 + 0.1 * u(rng), 0.05 + 0.4 * u(rng), omega_a);

    const double slope = imp.D * omega_a - imp.K;
    if (std::abs(slope) < 1e-6 * imp.K) continue;
    const auto cls = t_extremum(c, imp, omega_a);
    if (!cls.t_ex || *cls.t_ex < 1e-3) continue;

    const double h = 1e-6;
    const double t = *cls.t_ex;
    const double curvature = (f_tra(t + h, c, imp, omega_a) -
                              2.0 * f_tra(t, c, imp, omega_a) +
                              f_tra(t - h, c, imp, omega_a)) /
                             (h * h);
    CHECK(curvature * slope < 0.0);
    ++checked;
  }
}

TEST_CASE("check_smooth_condition: table values and boundaries") {
  CHECK(check_smooth_condition(15.0, 1.0, 5.0) == SmoothVerdict::satisfied);
  CHECK(check_smooth_condition(10.0, 1.0, 5.0) == SmoothVerdict::violated_low);  // equality
  CHECK(check_smooth_condition(20.0, 1.0, 5.0) == SmoothVerdict::satisfied);     // inclusive top
  CHECK(check_smooth_condition(20.0000001, 1.0, 5.0) == SmoothVerdict::violated_high);
  CHECK(check_smooth_condition(5.0, 1.0, 10.0) == SmoothVerdict::violated_low);
  CHECK_THROWS_AS(check_smooth_condition(-1.0, 1.0, 5.0), ConfigError);
}

TEST_CASE("design_omega_a_range: exact endpoints and scaling") {
  const auto r = design_omega_a_range(15.0, 1.0);
  CHECK(r.lower == 3.75);
  CHECK(r.upper == 7.5);
  CHECK(r.contains(5.0));    // the reference gain set sits inside
  CHECK(r.contains(3.75));   // lower bound inclusive
  CHECK(!r.contains(7.5));   // upper bound exclusive

  const auto half = design_omega_a_range(15.0, 2.0);
  CHECK(half.lower == doctest::Approx(r.lower / 2.0));
  CHECK(half.upper == doctest::Approx(r.upper / 2.0));

  const auto r2 = design_omega_a_range(10.0, 0.5);
  CHECK(r2.lower == 5.0);
  CHECK(r2.upper == 10.0);

  // Every omega_a inside the range satisfies the condition.
  for (double w = r.lower; w < r.upper; w += 0.05) {
    CHECK(check_smooth_condition(15.0, 1.0, w) == SmoothVerdict::satisfied);
  }

  // Equivalent (M, D, K) parameterization gives the same range.
  const auto mdk = design_omega_a_range(SecondOrderParams::from_mdk(0.5, 15.0, 112.5));
  CHECK(mdk.lower == 3.75);
  CHECK(mdk.upper == 7.5);
}

TEST_CASE("contraposition: satisfied draws never classify as a possible local minimum") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double omega_a = 2.0 + 18.0 * u(rng);
    const double zeta_i = 0.3 + 1.5 * u(rng);
    // Inside (2*zeta*omega_a, 4*zeta*omega_a].
    const double omega_i = zeta_i * omega_a * (2.0 + 2.0 * u(rng)) + 1e-9;
    const auto imp = SecondOrderParams::from_natural(0.3 + u(rng), omega_i, zeta_i);
    const auto c = ContactState::make(0.005 + 0.2 * u(rng), 0.01 + 0.6 * u(rng), omega_a);
    const auto cls = t_extremum(c, imp, omega_a);
    CHECK(cls.kind != TransitionKind::local_minimum_possible);
    CHECK(cls.kind != TransitionKind::local_maximum);
  }
}

TEST_CASE("initial_contact_force: per-law values") {
  const auto imp = SecondOrderParams::from_natural(0.8, 15.0, 1.0);
  const double m = 0.5;
  const double omega_a = 5.0;

  auto c = ContactState::make(0.0, 0.0, omega_a);
  c.a_c = 0.0;
  CHECK(initial_contact_force(ImpedanceLaw::no_feedforward, c, imp, m, 0.0) == 0.0);

  c.a_c = -2.0;
  CHECK(initial_contact_force(ImpedanceLaw::no_feedforward, c, imp, m, 0.0) ==
        doctest::Approx(imp.M * c.a_c));
  CHECK(initial_contact_force(ImpedanceLaw::mi_equals_m, c, imp, m, 0.0) ==
        doctest::Approx(m * c.a_c));

  // Full feedforward with eta = nu = 0 keeps only the inertial mismatch term.
  const double a_d0 = 0.7;
  CHECK(initial_contact_force(ImpedanceLaw::full_feedforward, c, imp, m, a_d0) ==
        doctest::Approx(imp.M * (c.a_c - a_d0)));

  const auto offset = ContactState::make(0.02, 0.1, omega_a, 0.0, 0.0, -2.0);
  CHECK(initial_contact_force(ImpedanceLaw::full_feedforward, offset, imp, m, 0.0) ==
        doctest::Approx(imp.M * offset.a_c +
                        imp.M * omega_a * (offset.eta + offset.nu)));
}

TEST_CASE("impact metrics: reference arithmetic and edge cases") {
  CHECK(reduction_effect(15.3, 3.81) == doctest::Approx(75.0980392156862745));
  CHECK(std::round(reduction_effect(15.3, 3.81) * 10.0) / 10.0 == 75.1);
  CHECK(reduction_effect(12.6, 3.56) == doctest::Approx(71.746031746031746));
  CHECK(std::round(reduction_effect(12.6, 3.56) * 10.0) / 10.0 == 71.7);
  CHECK(reduction_effect(4.2, 4.2) == 0.0);
  CHECK_THROWS_AS(reduction_effect(0.0, 1.0), ConfigError);
}

namespace {

SimTrace synthetic_trace(std::size_t n, double dt) {
  SimTrace tr;
  tr.dt = dt;
  tr.stage_count = 1;
  tr.x_v.resize(1);
  tr.v_v.resize(1);
  for (std::size_t k = 0; k < n; ++k) {
    tr.t.push_back(k * dt);
    tr.x_d.push_back(0.0);
    tr.v_d.push_back(0.0);
    tr.a_d.push_back(0.0);
    tr.x_v[0].push_back(0.0);
    tr.v_v[0].push_back(0.0);
    tr.x.push_back(0.0);
    tr.v.push_back(0.0);
    tr.a.push_back(0.0);
    tr.x_obs.push_back(1.0);
    tr.v_obs.push_back(0.0);
    tr.gap.push_back(1.0);
    tr.xi.push_back(1.0);
    tr.f_p.push_back(0.0);
    tr.f_c.push_back(0.0);
    tr.u.push_back(0.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("impact metrics: stats over traces and the no-contact error") {
  SimTrace quiet = synthetic_trace(10, 1e-3);
  CHECK_THROWS_AS(peak_contact_force(quiet), NoContactError);

  SimTrace hit = synthetic_trace(10, 1e-3);
  hit.gap[5] = -0.001;
  hit.f_c[5] = -7.5;
  hit.f_c[6] = -3.0;
  CHECK(peak_contact_force(hit) == doctest::Approx(7.5));

  SimTrace hit2 = hit;
  hit2.f_c[5] = -8.5;
  const SimTrace* traces[] = {&hit, &hit2};
  const auto stats = impact_stats(traces);
  CHECK(stats.mean == doctest::Approx(8.0));
  CHECK(stats.sd == doctest::Approx(std::sqrt(0.5)));

  const SimTrace* bad[] = {&hit, &quiet};
  CHECK_THROWS_AS(impact_stats(bad), NoContactError);
}

TEST_CASE("superposition_check: identically zero forces give zero residual") {
  const SimTrace tr = synthetic_trace(100, 1e-4);
  const auto adm = SecondOrderParams::from_natural(1.0, 5.0, 1.0);
  const auto imp = SecondOrderParams::from_natural(0.5, 15.0, 1.0);
  CHECK(superposition_check(tr, adm, imp) == 0.0);

  SimTrace two = tr;
  two.stage_count = 2;
  two.x_v.push_back(two.x_v[0]);
  two.v_v.push_back(two.v_v[0]);
  CHECK_THROWS_AS(superposition_check(two, adm, imp), ConfigError);
}

TEST_CASE("extract_f_tra reproduces the closed-form transition term on a synthetic trace") {
  const double omega_a = 5.0;
  const auto imp = SecondOrderParams::from_natural(0.5, 15.0, 1.0);
  const auto c = ContactState::make(0.03, 0.2, omega_a);
  SimTrace tr = synthetic_trace(200, 1e-3);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto y = closed_form_y(tr.t[k], c, omega_a);
    tr.x_v[0][k] = y.y;  // x_d stays 0
    tr.v_v[0][k] = y.y_dot;
  }
  const auto series = extract_f_tra(tr, imp);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(series[k] == doctest::Approx(f_tra(tr.t[k], c, imp, omega_a)).epsilon(1e-10));
  }
}

TEST_CASE("contact_state_at_onset interpolates the snapshot") {
  SimTrace tr = synthetic_trace(10, 0.1);
  // Gap crosses zero midway between samples 4 and 5.
  for (std::size_t k = 0; k < tr.size(); ++k) tr.gap[k] = 0.45 - 0.1 * k;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    tr.x_v[0][k] = 0.01 * k;
    tr.v_v[0][k] = 0.1;
    tr.a[k] = -2.0;
  }
  const auto onset = trace_contact_onset(tr);
  REQUIRE(onset);
  CHECK(*onset == doctest::Approx(0.45));
  const auto c = contact_state_at_onset(tr, 5.0);
  CHECK(c.sigma == doctest::Approx(0.045));
  CHECK(c.nu == doctest::Approx(0.1));
  CHECK(c.a_c == doctest::Approx(-2.0));
  CHECK(c.eta == doctest::Approx(c.nu + 5.0 * c.sigma));

  const SimTrace quiet = synthetic_trace(10, 0.1);
  CHECK_THROWS_AS(contact_state_at_onset(quiet, 5.0), NoContactError);
}

TEST_CASE("t_extremum: omega_i grid at omega_a = 10 classifies per the inequalities") {
  const double omega_a = 10.0;
  const auto c = ContactState::make(0.03, 0.2, omega_a);
  auto kind_for = [&](double omega_i) {
    return t_extremum(c, SecondOrderParams::from_natural(0.5, omega_i, 1.0), omega_a).kind;
  };
  // Below 2*zeta_i*omega_a = 20 the transition has a local maximum; inside
  // (20, 40] it is smooth.
  CHECK(kind_for(5.0) == TransitionKind::local_maximum);
  CHECK(kind_for(15.0) == TransitionKind::local_maximum);
  CHECK(kind_for(25.0) == TransitionKind::no_extremum_smooth);

  // Dense-sampling agreement for each grid point.
  for (double omega_i : {5.0, 15.0, 25.0}) {
    const auto imp = SecondOrderParams::from_natural(0.5, omega_i, 1.0);
    const auto cls = t_extremum(c, imp, omega_a);
    const auto scan = scan_f_tra(c, imp, omega_a, 10.0 / omega_a);
    const double f0 = f_tra(0.0, c, imp, omega_a);
    if (cls.kind == TransitionKind::local_maximum) {
      CHECK(std::abs(scan.t_max - *cls.t_ex) < 2e-5);
    } else {
      CHECK(scan.v_min >= std::min(f0, 0.0) - 1e-12);
      CHECK(scan.v_max <= std::max(f0, 0.0) + 1e-12);
    }
  }
}
