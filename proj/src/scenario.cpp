#include "scenario.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace preimpact {

namespace {

constexpr double kDefaultStandoff = 0.05;   // initial gap for approach scenarios [m]
constexpr double kDefaultPathSpan = 0.1;    // minimum-jerk travel [m]
constexpr double kDefaultPathDuration = 1.0;
constexpr double kDefaultPathStart = 0.2;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// (M, D, K) or (M, omega, zeta) entry; mixing the two forms is an error.
SecondOrderParams read_second_order(const ConfigSection& s, double def_m,
                                    double def_omega, double def_zeta) {
  const bool has_dk = s.has("D") || s.has("K");
  const bool has_nat = s.has("omega") || s.has("zeta");
  if (has_dk && has_nat) {
    throw ConfigError("give either (M, D, K) or (M, omega, zeta), not both",
                      s.line);
  }
  const double m = s.has("M") ? s.require("M").as_positive("M")
                              : def_m;
  if (has_dk) {
    const double d = s.require("D").as_positive("D");
    const double k = s.require("K").as_positive("K");
    return SecondOrderParams::from_mdk(m, d, k);
  }
  const double omega = s.has("omega") ? s.require("omega").as_positive("omega")
                                      : def_omega;
  const double zeta = s.has("zeta") ? s.require("zeta").as_positive("zeta")
                                    : def_zeta;
  return SecondOrderParams::from_natural(m, omega, zeta);
}

ImpedanceLaw law_from_string(const std::string& s, int line) {
  if (s == "full_feedforward") return ImpedanceLaw::full_feedforward;
  if (s == "no_feedforward") return ImpedanceLaw::no_feedforward;
  if (s == "mi_equals_m") return ImpedanceLaw::mi_equals_m;
  throw ConfigError("unknown impedance law '" + s + "'", line);
}

std::string law_to_string(ImpedanceLaw law) {
  switch (law) {
    case ImpedanceLaw::full_feedforward: return "full_feedforward";
    case ImpedanceLaw::no_feedforward: return "no_feedforward";
    case ImpedanceLaw::mi_equals_m: return "mi_equals_m";
  }
  return "";
}

ForceSource source_from_string(const std::string& s, int line) {
  if (s == "f_p") return ForceSource::virtual_force;
  if (s == "f_c") return ForceSource::contact_force;
  throw ConfigError("stage source must be \"f_p\" or \"f_c\"", line);
}

void check_mi_equals_m(const ChainSpec& spec, double plant_mass, int line) {
  if (spec.terminal == TerminalKind::impedance &&
      spec.law == ImpedanceLaw::mi_equals_m &&
      std::abs(spec.impedance.M - plant_mass) >
          1e-12 * std::max(1.0, plant_mass)) {
    throw ConfigError("the mi_equals_m law requires the impedance inertia to equal "
                      "the plant mass",
                      line);
  }
}

}  // namespace

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "a") return ScenarioKind::a;
  if (s == "b") return ScenarioKind::b;
  if (s == "c") return ScenarioKind::c;
  if (s == "d") return ScenarioKind::d;
  throw ConfigError("scenario kind must be one of a, b, c, d");
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::a: return "a";
    case ScenarioKind::b: return "b";
    case ScenarioKind::c: return "c";
    case ScenarioKind::d: return "d";
  }
  return "";
}

DesiredState TrajectoryPlan::at(double t) const {
  if (kind == Kind::hold) return DesiredState{hold_x, 0.0, 0.0};
  return min_jerk(mj, t);
}

void Scenario::validate() const {
  if (!(plant_mass > 0.0)) throw ConfigError("plant mass must be > 0");
  controller.validate();
  sensor.validate();
  gain.validate();
  contact.validate();
  obstacle_law.validate();
  integrator.validate();
  if (!(noise_std >= 0.0)) throw ConfigError("sensor noise_std must be >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (contact_normal != 1.0 && contact_normal != -1.0) {
    throw ConfigError("contact normal must be +1 or -1");
  }

  if (filter.enabled) {
    FilterConfig effective = filter;
    effective.sample_hz = 1.0 / integrator.dt;
    effective.validate();
  }
  if (control_hold) {
    const double ratio = control_dt / integrator.dt;
    if (!(control_dt > 0.0) ||
        std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      throw ConfigError("control_dt must be a positive multiple of dt");
    }
  }
  if (trajectory.kind == TrajectoryPlan::Kind::min_jerk) trajectory.mj.validate();

  const double plant_x0 = trajectory.at(0.0).x;
  const bool obstacle_positive_side = obstacle_x0 > plant_x0;
  if (contact_normal != (obstacle_positive_side ? -1.0 : 1.0)) {
    throw ConfigError("contact normal inconsistent with the obstacle side");
  }

  if (obstacle_law.kind == ObstacleLaw::Kind::approach_constant_velocity) {
    if (obstacle_law.v0 == 0.0 ||
        (obstacle_positive_side ? obstacle_law.v0 > 0.0 : obstacle_law.v0 < 0.0)) {
      throw ConfigError("approach velocity must move the obstacle toward the plant");
    }
  } else if (trajectory.kind == TrajectoryPlan::Kind::min_jerk) {
    const double lo = std::min(trajectory.mj.x0, trajectory.mj.xf);
    const double hi = std::max(trajectory.mj.x0, trajectory.mj.xf);
    if (!(obstacle_x0 > lo && obstacle_x0 < hi)) {
      throw ConfigError("fixed obstacle must sit strictly inside the trajectory span");
    }
  }
}

Scenario build_scenario(ScenarioKind kind) {
  ConfigDoc doc = ConfigDoc::parse("schema_version = 1\n[scenario]\nkind = \"" +
                                   to_string(kind) + "\"\n");
  return scenario_from_doc(doc);
}

Scenario scenario_from_doc(const ConfigDoc& doc) {
  const ConfigValue& version = doc.root().require("schema_version");
  if (version.as_number() != 1.0) {
    throw ConfigError("unsupported schema_version (expected 1)", version.line);
  }

  Scenario sc;

  const ConfigSection& scen = doc.section("scenario");
  sc.kind = scenario_kind_from_string(scen.string_or("kind", "c"));
  const double seed = scen.number_or("seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) {
    throw ConfigError("scenario seed must be a non-negative integer", scen.line);
  }
  sc.seed = static_cast<std::uint64_t>(seed);
  const double trials = scen.number_or("trials", 1.0);
  if (trials < 1.0 || trials != std::floor(trials)) {
    throw ConfigError("scenario trials must be a positive integer", scen.line);
  }
  sc.trials = static_cast<int>(trials);

  const bool negative_side = sc.kind == ScenarioKind::a || sc.kind == ScenarioKind::b;
  const double side = negative_side ? -1.0 : 1.0;
  sc.contact_normal = negative_side ? 1.0 : -1.0;

  const bool approaches = sc.kind == ScenarioKind::a || sc.kind == ScenarioKind::c;

  const ConfigSection& integ = doc.section("integrator");
  sc.integrator.dt = integ.number_or("dt", 1e-4);
  // The braked final approach of the trajectory scenarios is slow; give them
  // a longer default horizon.
  sc.integrator.t_end = integ.number_or("t_end", approaches ? 2.5 : 4.0);
  const std::string method = integ.string_or("method", "rk4");
  if (method == "rk4") {
    sc.integrator.method = IntegratorMethod::rk4;
  } else if (method == "semi_implicit_euler") {
    sc.integrator.method = IntegratorMethod::semi_implicit_euler;
  } else {
    throw ConfigError("integrator method must be rk4 or semi_implicit_euler",
                      integ.line);
  }
  sc.control_hold = integ.bool_or("control_hold", false);
  sc.control_dt = integ.number_or("control_dt", 1e-3);

  sc.plant_mass = doc.section("plant").number_or("mass", 0.5);

  // Controller.
  const ConfigSection& ctrl = doc.section("controller");
  const std::string ctrl_kind = ctrl.string_or("kind", "pacic");
  sc.init_sigma = ctrl.number_or("init_sigma", 0.0);
  sc.init_nu = ctrl.number_or("init_nu", 0.0);

  const SecondOrderParams adm =
      read_second_order(doc.section("admittance"), 1.0, 5.0, 1.0);

  if (ctrl_kind == "pacic") {
    if (!doc.stages().empty() || doc.has_section("terminal")) {
      throw ConfigError("[stage]/[terminal] sections require controller.kind = "
                        "\"chain\"", ctrl.line);
    }
    if (doc.has_section("admittance2") || doc.has_section("pd")) {
      throw ConfigError("[admittance2]/[pd] sections require controller.kind = "
                        "\"pacac\"", ctrl.line);
    }
    const ImpedanceLaw law = law_from_string(ctrl.string_or("law", "mi_equals_m"), ctrl.line);
    const SecondOrderParams imp =
        read_second_order(doc.section("impedance"), sc.plant_mass, 15.0, 1.0);
    sc.controller = ChainSpec::pacic(adm, imp, law);
    check_mi_equals_m(sc.controller, sc.plant_mass, doc.section("impedance").line);
  } else if (ctrl_kind == "pacac") {
    if (!doc.stages().empty() || doc.has_section("terminal") ||
        doc.has_section("impedance")) {
      throw ConfigError("pacac uses [admittance], [admittance2] and [pd] sections",
                        ctrl.line);
    }
    if (ctrl.has("law")) {
      throw ConfigError("controller.law applies to impedance terminals only",
                        ctrl.line);
    }
    const SecondOrderParams adm2 =
        read_second_order(doc.section("admittance2"), sc.plant_mass, 15.0, 1.0);
    const ConfigSection& pd = doc.section("pd");
    PdGains gains;
    gains.kp = pd.number_or("kp", 1e6);
    gains.kd = pd.number_or("kd", 2.0 * std::sqrt(sc.plant_mass * gains.kp));
    sc.controller = ChainSpec::pacac(adm, adm2, gains);
  } else if (ctrl_kind == "chain") {
    if (doc.has_section("admittance") || doc.has_section("admittance2") ||
        doc.has_section("impedance") || doc.has_section("pd")) {
      throw ConfigError("chain controllers use [stage] and [terminal] sections",
                        ctrl.line);
    }
    if (ctrl.has("law")) {
      throw ConfigError("place the impedance law in [terminal] for chains",
                        ctrl.line);
    }
    ChainSpec spec;
    if (doc.stages().empty()) {
      throw ConfigError("chain controller needs at least one [stage]", ctrl.line);
    }
    for (const ConfigSection& st : doc.stages()) {
      StageConfig stage;
      stage.source = source_from_string(st.require("source").as_string(), st.line);
      stage.params = read_second_order(st, 1.0, 5.0, 1.0);
      spec.stages.push_back(stage);
    }
    const ConfigSection& term = doc.section("terminal");
    const std::string term_kind = term.string_or("kind", "impedance");
    if (term_kind == "impedance") {
      spec.terminal = TerminalKind::impedance;
      spec.law = law_from_string(term.string_or("law", "mi_equals_m"), term.line);
      spec.impedance = read_second_order(term, sc.plant_mass, 15.0, 1.0);
    } else if (term_kind == "pd") {
      spec.terminal = TerminalKind::pd;
      spec.pd.kp = term.number_or("kp", 1e6);
      spec.pd.kd = term.number_or("kd", 2.0 * std::sqrt(sc.plant_mass * spec.pd.kp));
    } else {
      throw ConfigError("terminal kind must be \"impedance\" or \"pd\"", term.line);
    }
    spec.validate();
    sc.controller = spec;
    check_mi_equals_m(sc.controller, sc.plant_mass, term.line);
  } else {
    throw ConfigError("controller kind must be pacic, pacac or chain", ctrl.line);
  }

  // Sensing.
  const ConfigSection& sensor = doc.section("sensor");
  sc.sensor.g_xi = sensor.number_or("g_xi", 1.0);
  sc.sensor.alpha = sensor.number_or("alpha", 1.0);
  sc.sensor.psi = sensor.number_or("psi", 1.0);
  sc.sensor.d_offset = sensor.number_or("d_offset", 5e-3);
  sc.sensor.n = sensor.number_or("n", 2.0);
  sc.sensor.residual_offset = sensor.number_or("residual_offset", 0.0);
  sc.noise_std = sensor.number_or("noise_std", 0.0);

  const ConfigSection& filter = doc.section("filter");
  sc.filter.enabled = filter.bool_or("enabled", true);
  sc.filter.order = static_cast<int>(filter.number_or("order", 5.0));
  sc.filter.cutoff_hz = filter.number_or("cutoff_hz", 500.0);
  sc.filter.sample_hz = 1.0 / sc.integrator.dt;

  const ConfigSection& gain = doc.section("gain");
  sc.gain.g_p = gain.number_or("g_p", 0.8);
  if (gain.has("saturation")) {
    sc.gain.saturation = gain.require("saturation").as_positive("saturation");
  }

  // Environment.
  const ConfigSection& contact = doc.section("contact");
  sc.contact.k_c = contact.number_or("k_c", 1e5);
  sc.contact.c_c = contact.number_or("c_c", 50.0);

  const bool approaching = approaches;
  const ConfigSection& obstacle = doc.section("obstacle");
  const std::string obstacle_law =
      obstacle.string_or("law", approaching ? "approach" : "fixed");
  if (obstacle_law == "approach") {
    if (!approaching) {
      throw ConfigError("scenarios b and d use a fixed obstacle", obstacle.line);
    }
    sc.obstacle_law.kind = ObstacleLaw::Kind::approach_constant_velocity;
  } else if (obstacle_law == "fixed") {
    if (approaching) {
      throw ConfigError("scenarios a and c use an approaching obstacle",
                        obstacle.line);
    }
    sc.obstacle_law.kind = ObstacleLaw::Kind::fixed;
  } else {
    throw ConfigError("obstacle law must be \"approach\" or \"fixed\"", obstacle.line);
  }
  sc.obstacle_law.v0 = obstacle.number_or("v0", -side * 0.3);
  sc.obstacle_law.mass = obstacle.number_or("mass", 1.0);
  sc.obstacle_law.f_fric = obstacle.number_or("f_fric", 0.0);

  // Trajectory and geometry.
  const ConfigSection& traj = doc.section("trajectory");
  if (approaching) {
    if (doc.has_section("trajectory")) {
      throw ConfigError("scenarios a and c hold the desired position; no "
                        "[trajectory] section", traj.line);
    }
    sc.trajectory.kind = TrajectoryPlan::Kind::hold;
    sc.trajectory.hold_x = 0.0;
    const double standoff = obstacle.number_or("standoff", kDefaultStandoff);
    if (!(standoff > 0.0)) throw ConfigError("obstacle standoff must be > 0",
                                             obstacle.line);
    sc.obstacle_x0 = obstacle.number_or("position", side * standoff);
  } else {
    sc.trajectory.kind = TrajectoryPlan::Kind::min_jerk;
    sc.trajectory.mj.x0 = traj.number_or("x0", 0.0);
    sc.trajectory.mj.xf = traj.number_or("xf", side * kDefaultPathSpan);
    sc.trajectory.mj.duration = traj.number_or("duration", kDefaultPathDuration);
    sc.trajectory.mj.t0 = traj.number_or("t0", kDefaultPathStart);
    sc.obstacle_x0 = obstacle.number_or(
        "position", 0.5 * (sc.trajectory.mj.x0 + sc.trajectory.mj.xf));
  }

  sc.report_baseline = doc.section("report").bool_or("baseline", true);

  doc.reject_unconsumed();
  sc.validate();
  return sc;
}

std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream out;
  out << "schema_version = 1\n";
  out << "\n[scenario]\n";
  out << "kind = \"" << to_string(sc.kind) << "\"\n";
  out << "seed = " << sc.seed << "\n";
  out << "trials = " << sc.trials << "\n";
  out << "\n[integrator]\n";
  out << "dt = " << fmt(sc.integrator.dt) << "\n";
  out << "t_end = " << fmt(sc.integrator.t_end) << "\n";
  out << "method = \""
      << (sc.integrator.method == IntegratorMethod::rk4 ? "rk4"
                                                        : "semi_implicit_euler")
      << "\"\n";
  out << "control_hold = " << (sc.control_hold ? "true" : "false") << "\n";
  out << "control_dt = " << fmt(sc.control_dt) << "\n";
  out << "\n[plant]\n";
  out << "mass = " << fmt(sc.plant_mass) << "\n";

  const ChainSpec& ctrl = sc.controller;
  const bool is_pacic = ctrl.stages.size() == 1 &&
                        ctrl.stages[0].source == ForceSource::virtual_force &&
                        ctrl.terminal == TerminalKind::impedance;
  const bool is_pacac = ctrl.stages.size() == 2 &&
                        ctrl.stages[0].source == ForceSource::virtual_force &&
                        ctrl.stages[1].source == ForceSource::contact_force &&
                        ctrl.terminal == TerminalKind::pd;
  auto emit_params = [&out](const SecondOrderParams& p) {
    out << "M = " << fmt(p.M) << "\n";
    out << "D = " << fmt(p.D) << "\n";
    out << "K = " << fmt(p.K) << "\n";
  };
  out << "\n[controller]\n";
  if (is_pacic) {
    out << "kind = \"pacic\"\n";
    out << "law = \"" << law_to_string(ctrl.law) << "\"\n";
  } else if (is_pacac) {
    out << "kind = \"pacac\"\n";
  } else {
    out << "kind = \"chain\"\n";
  }
  if (sc.init_sigma != 0.0) out << "init_sigma = " << fmt(sc.init_sigma) << "\n";
  if (sc.init_nu != 0.0) out << "init_nu = " << fmt(sc.init_nu) << "\n";
  if (is_pacic) {
    out << "\n[admittance]\n";
    emit_params(ctrl.stages[0].params);
    out << "\n[impedance]\n";
    emit_params(ctrl.impedance);
  } else if (is_pacac) {
    out << "\n[admittance]\n";
    emit_params(ctrl.stages[0].params);
    out << "\n[admittance2]\n";
    emit_params(ctrl.stages[1].params);
    out << "\n[pd]\n";
    out << "kp = " << fmt(ctrl.pd.kp) << "\n";
    out << "kd = " << fmt(ctrl.pd.kd) << "\n";
  } else {
    out << "\n[terminal]\n";
    if (ctrl.terminal == TerminalKind::impedance) {
      out << "kind = \"impedance\"\n";
      out << "law = \"" << law_to_string(ctrl.law) << "\"\n";
      emit_params(ctrl.impedance);
    } else {
      out << "kind = \"pd\"\n";
      out << "kp = " << fmt(ctrl.pd.kp) << "\n";
      out << "kd = " << fmt(ctrl.pd.kd) << "\n";
    }
  }

  out << "\n[sensor]\n";
  out << "g_xi = " << fmt(sc.sensor.g_xi) << "\n";
  out << "alpha = " << fmt(sc.sensor.alpha) << "\n";
  out << "psi = " << fmt(sc.sensor.psi) << "\n";
  out << "d_offset = " << fmt(sc.sensor.d_offset) << "\n";
  out << "n = " << fmt(sc.sensor.n) << "\n";
  out << "residual_offset = " << fmt(sc.sensor.residual_offset) << "\n";
  out << "noise_std = " << fmt(sc.noise_std) << "\n";
  out << "\n[filter]\n";
  out << "enabled = " << (sc.filter.enabled ? "true" : "false") << "\n";
  out << "order = " << sc.filter.order << "\n";
  out << "cutoff_hz = " << fmt(sc.filter.cutoff_hz) << "\n";
  out << "\n[gain]\n";
  out << "g_p = " << fmt(sc.gain.g_p) << "\n";
  if (sc.gain.saturation) out << "saturation = " << fmt(*sc.gain.saturation) << "\n";
  out << "\n[contact]\n";
  out << "k_c = " << fmt(sc.contact.k_c) << "\n";
  out << "c_c = " << fmt(sc.contact.c_c) << "\n";
  out << "\n[obstacle]\n";
  out << "law = \""
      << (sc.obstacle_law.kind == ObstacleLaw::Kind::fixed ? "fixed" : "approach")
      << "\"\n";
  if (sc.obstacle_law.kind == ObstacleLaw::Kind::approach_constant_velocity) {
    out << "v0 = " << fmt(sc.obstacle_law.v0) << "\n";
  }
  out << "mass = " << fmt(sc.obstacle_law.mass) << "\n";
  out << "f_fric = " << fmt(sc.obstacle_law.f_fric) << "\n";
  out << "position = " << fmt(sc.obstacle_x0) << "\n";
  if (sc.trajectory.kind == TrajectoryPlan::Kind::min_jerk) {
    out << "\n[trajectory]\n";
    out << "x0 = " << fmt(sc.trajectory.mj.x0) << "\n";
    out << "xf = " << fmt(sc.trajectory.mj.xf) << "\n";
    out << "duration = " << fmt(sc.trajectory.mj.duration) << "\n";
    out << "t0 = " << fmt(sc.trajectory.mj.t0) << "\n";
  }
  out << "\n[report]\n";
  out << "baseline = " << (sc.report_baseline ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace preimpact
