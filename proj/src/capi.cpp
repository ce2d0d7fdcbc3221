#include "preimpact.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "engine.hpp"
#include "scenario.hpp"

using nlohmann::json;
using namespace preimpact;

struct pi_config {
  ConfigDoc doc;
};

struct pi_run {
  Scenario scenario;
  SimTrace trace;
  RunDiagnostics diags;
};

namespace {

thread_local std::string g_last_error;

pi_status fail(pi_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

/// Maps the C++ error taxonomy onto status codes.
pi_status translate_current_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    return fail(PI_ERR_CONFIG, e.what());
  } catch (const IntegrationFault& e) {
    return fail(PI_ERR_NUMERIC, e.what());
  } catch (const NoContactError& e) {
    return fail(PI_ERR_NO_CONTACT, e.what());
  } catch (const DegenerateInput& e) {
    return fail(PI_ERR_INVALID_ARG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PI_ERR_IO, "out of memory");
  } catch (const std::exception& e) {
    return fail(PI_ERR_INVALID_ARG, e.what());
  } catch (...) {
    return fail(PI_ERR_INVALID_ARG, "unknown error");
  }
}

template <class Fn>
pi_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (...) {
    return translate_current_exception();
  }
}

void apply_seed_env(ConfigDoc& doc) {
  const char* env = std::getenv("PREIMPACT_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(env, &end, 10);
  if (!end || *end != '\0') {
    throw ConfigError("PREIMPACT_SEED must be a non-negative integer");
  }
  doc.set("scenario.seed", std::to_string(seed));
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

/// Second-order parameters of the contact-facing part: the impedance terminal
/// when present, otherwise the last contact-driven admittance stage.
std::optional<SecondOrderParams> contact_part_params(const ChainSpec& spec) {
  if (spec.terminal == TerminalKind::impedance) return spec.impedance;
  for (auto it = spec.stages.rbegin(); it != spec.stages.rend(); ++it) {
    if (it->source == ForceSource::contact_force) return it->params;
  }
  return std::nullopt;
}

const char* smooth_name(SmoothVerdict v) {
  switch (v) {
    case SmoothVerdict::satisfied: return "satisfied";
    case SmoothVerdict::violated_low: return "violated_low";
    case SmoothVerdict::violated_high: return "violated_high";
  }
  return "";
}

json conditions_json(const Scenario& sc) {
  json out;
  const SecondOrderParams& stage1 = sc.controller.stages[0].params;
  out["omega_a"] = stage1.omega();
  out["zeta_a"] = stage1.zeta();
  out["zeta_a_is_critical"] = std::abs(stage1.zeta() - 1.0) <= 1e-9;
  const auto contact_part = contact_part_params(sc.controller);
  if (contact_part) {
    const double omega_i = contact_part->omega();
    const double zeta_i = contact_part->zeta();
    out["omega_i"] = omega_i;
    out["zeta_i"] = zeta_i;
    out["smooth_condition"] =
        smooth_name(check_smooth_condition(omega_i, zeta_i, stage1.omega()));
    const OmegaRange range = design_omega_a_range(omega_i, zeta_i);
    out["design_range"] = {range.lower, range.upper};
    out["omega_a_in_design_range"] = range.contains(stage1.omega());
  } else {
    out["smooth_condition"] = nullptr;
  }
  return out;
}

json run_report(const pi_run& run) {
  json report;
  report["schema_version"] = 1;
  report["scenario_kind"] = to_string(run.scenario.kind);
  report["samples"] = run.trace.size();
  report["dt"] = run.trace.dt;
  report["stage_count"] = run.trace.stage_count;

  json contact;
  const auto onset = trace_contact_onset(run.trace);
  contact["onset_time"] = onset ? json(*onset) : json(nullptr);
  contact["peak_force"] = onset ? json(peak_contact_force(run.trace)) : json(nullptr);
  report["contact"] = contact;

  json diag;
  diag["sensor_signal_lost"] = run.diags.sensor_signal_lost;
  diag["saturation_hits"] = run.diags.saturation_hits;
  diag["obstacle_release_time"] = run.diags.obstacle_release_time
                                      ? json(*run.diags.obstacle_release_time)
                                      : json(nullptr);
  report["diagnostics"] = diag;

  report["conditions"] = conditions_json(run.scenario);
  return report;
}

}  // namespace

extern "C" {

const char* pi_version(void) { return "0.1.0"; }

const char* pi_status_name(pi_status status) {
  switch (status) {
    case PI_OK: return "ok";
    case PI_ERR_CONFIG: return "config error";
    case PI_ERR_NUMERIC: return "numeric fault";
    case PI_ERR_NO_CONTACT: return "no contact event";
    case PI_ERR_INVALID_ARG: return "invalid argument";
    case PI_ERR_IO: return "io error";
  }
  return "unknown";
}

const char* pi_last_error(void) { return g_last_error.c_str(); }

pi_status pi_config_from_file(const char* path, pi_config** out) {
  if (!path || !out) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<pi_config>();
    cfg->doc = ConfigDoc::parse_file(path);
    apply_seed_env(cfg->doc);
    scenario_from_doc(cfg->doc);  // validate eagerly
    *out = cfg.release();
    return PI_OK;
  });
}

pi_status pi_config_from_string(const char* text, pi_config** out) {
  if (!text || !out) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<pi_config>();
    cfg->doc = ConfigDoc::parse(text);
    apply_seed_env(cfg->doc);
    scenario_from_doc(cfg->doc);
    *out = cfg.release();
    return PI_OK;
  });
}

pi_status pi_config_builtin(char scenario_kind, pi_config** out) {
  if (!out) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto cfg = std::make_unique<pi_config>();
    cfg->doc = ConfigDoc::parse(
        std::string("schema_version = 1\n[scenario]\nkind = \"") + scenario_kind +
        "\"\n");
    apply_seed_env(cfg->doc);
    scenario_from_doc(cfg->doc);
    *out = cfg.release();
    return PI_OK;
  });
}

pi_status pi_config_clone(const pi_config* cfg, pi_config** out) {
  if (!cfg || !out) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out = new pi_config(*cfg);
    return PI_OK;
  });
}

pi_status pi_config_set(pi_config* cfg, const char* dotted_key, const char* value) {
  if (!cfg || !dotted_key || !value) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::string v = value;
    // Convenience: bare words that are not numbers/bools/arrays are strings.
    if (!v.empty() && v.front() != '"' && v.front() != '[' && v != "true" &&
        v != "false") {
      char* end = nullptr;
      std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0') v = "\"" + v + "\"";
    }
    cfg->doc.set(dotted_key, v);
    return PI_OK;
  });
}

pi_status pi_config_text(const pi_config* cfg, char** out_text) {
  if (!cfg || !out_text) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const Scenario sc = scenario_from_doc(cfg->doc);
    *out_text = dup_string(scenario_to_text(sc));
    return PI_OK;
  });
}

pi_status pi_config_write(const pi_config* cfg, const char* path) {
  if (!cfg || !path) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const Scenario sc = scenario_from_doc(cfg->doc);
    const std::string text = scenario_to_text(sc);
    std::FILE* f = std::fopen(path, "w");
    if (!f) throw ConfigError(std::string("cannot open for writing: ") + path);
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) {
      throw ConfigError(std::string("failed to write: ") + path);
    }
    return PI_OK;
  });
}

pi_status pi_config_get(const pi_config* cfg, const char* dotted_key,
                        char** out_value) {
  if (!cfg || !dotted_key || !out_value) {
    return fail(PI_ERR_INVALID_ARG, "null argument");
  }
  return guarded([&] {
    const Scenario sc = scenario_from_doc(cfg->doc);
    const ConfigDoc resolved = ConfigDoc::parse(scenario_to_text(sc));
    const std::string key = dotted_key;
    const std::size_t dot = key.find('.');
    const ConfigSection& section =
        dot == std::string::npos ? resolved.root() : resolved.section(key.substr(0, dot));
    const ConfigValue* value =
        section.find(dot == std::string::npos ? key : key.substr(dot + 1));
    if (!value) throw ConfigError("no such key: " + key);
    std::string text;
    switch (value->kind) {
      case ConfigValue::Kind::string: text = value->text; break;
      case ConfigValue::Kind::boolean: text = value->boolean ? "true" : "false"; break;
      case ConfigValue::Kind::number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value->number);
        text = buf;
        break;
      }
      case ConfigValue::Kind::array:
        throw ConfigError("array values are not exposed through pi_config_get");
    }
    *out_value = dup_string(text);
    return PI_OK;
  });
}

void pi_config_free(pi_config* cfg) { delete cfg; }

pi_status pi_run_scenario(const pi_config* cfg, pi_run** out) {
  if (!cfg || !out) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto run = std::make_unique<pi_run>();
    run->scenario = scenario_from_doc(cfg->doc);
    RunResult result = run_scenario(run->scenario);
    run->trace = std::move(result.trace);
    run->diags = result.diags;
    *out = run.release();
    return PI_OK;
  });
}

void pi_run_free(pi_run* run) { delete run; }

size_t pi_run_sample_count(const pi_run* run) { return run ? run->trace.size() : 0; }

size_t pi_run_column_count(const pi_run* run) {
  return run ? run->trace.column_names().size() : 0;
}

const char* pi_run_column_name(const pi_run* run, size_t index) {
  if (!run) return nullptr;
  static thread_local std::string name;
  const auto names = run->trace.column_names();
  if (index >= names.size()) return nullptr;
  name = names[index];
  return name.c_str();
}

pi_status pi_run_column(const pi_run* run, const char* name, const double** data,
                        size_t* length) {
  if (!run || !name || !data || !length) {
    return fail(PI_ERR_INVALID_ARG, "null argument");
  }
  return guarded([&] {
    const auto col = run->trace.column(name);
    *data = col.data();
    *length = col.size();
    return PI_OK;
  });
}

pi_status pi_run_write_trace_csv(const pi_run* run, const char* path) {
  if (!run || !path) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    run->trace.write_csv(path);
    return PI_OK;
  });
}

pi_status pi_run_peak_contact_force(const pi_run* run, double* peak) {
  if (!run || !peak) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *peak = peak_contact_force(run->trace);
    return PI_OK;
  });
}

pi_status pi_run_contact_onset_time(const pi_run* run, double* t_onset) {
  if (!run || !t_onset) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const auto onset = trace_contact_onset(run->trace);
    if (!onset) throw NoContactError("trace has no contact event");
    *t_onset = *onset;
    return PI_OK;
  });
}

pi_status pi_run_diag(const pi_run* run, size_t* sensor_signal_lost,
                      size_t* saturation_hits) {
  if (!run) return fail(PI_ERR_INVALID_ARG, "null argument");
  if (sensor_signal_lost) *sensor_signal_lost = run->diags.sensor_signal_lost;
  if (saturation_hits) *saturation_hits = run->diags.saturation_hits;
  return PI_OK;
}

pi_status pi_run_report_json(const pi_run* run, char** out_json) {
  if (!run || !out_json) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out_json = dup_string(run_report(*run).dump(2));
    return PI_OK;
  });
}

void pi_string_free(char* text) { std::free(text); }

pi_status pi_design_range(double omega_i, double zeta_i, double* lo, double* hi) {
  if (!lo || !hi) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const OmegaRange r = design_omega_a_range(omega_i, zeta_i);
    *lo = r.lower;
    *hi = r.upper;
    return PI_OK;
  });
}

pi_status pi_design_range_mdk(double M_i, double D_i, double K_i, double* lo,
                              double* hi) {
  if (!lo || !hi) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    const OmegaRange r = design_omega_a_range(SecondOrderParams::from_mdk(M_i, D_i, K_i));
    *lo = r.lower;
    *hi = r.upper;
    return PI_OK;
  });
}

pi_status pi_check_smooth_condition(double omega_i, double zeta_i, double omega_a,
                                    int* verdict) {
  if (!verdict) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    switch (check_smooth_condition(omega_i, zeta_i, omega_a)) {
      case SmoothVerdict::satisfied: *verdict = 0; break;
      case SmoothVerdict::violated_low: *verdict = 1; break;
      case SmoothVerdict::violated_high: *verdict = 2; break;
    }
    return PI_OK;
  });
}

pi_status pi_reduction_effect(double baseline_mean, double case_mean, double* pct) {
  if (!pct) return fail(PI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *pct = reduction_effect(baseline_mean, case_mean);
    return PI_OK;
  });
}

pi_status pi_impact_stats(const double* peaks, size_t count, double* mean,
                          double* sd) {
  if (!peaks || count == 0 || !mean || !sd) {
    return fail(PI_ERR_INVALID_ARG, "need at least one peak value");
  }
  double sum = 0.0;
  for (size_t i = 0; i < count; ++i) sum += peaks[i];
  *mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (size_t i = 0; i < count; ++i) ss += (peaks[i] - *mean) * (peaks[i] - *mean);
  *sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  return PI_OK;
}

pi_status pi_verify_trace(const pi_config* cfg, const char* trace_csv_path,
                          char** out_json) {
  if (!cfg || !trace_csv_path || !out_json) {
    return fail(PI_ERR_INVALID_ARG, "null argument");
  }
  return guarded([&] {
    const Scenario sc = scenario_from_doc(cfg->doc);
    const SimTrace tr = SimTrace::read_csv(trace_csv_path);
    if (tr.stage_count != sc.controller.stage_count()) {
      throw ConfigError("trace stage count does not match the configuration");
    }

    json report;
    report["schema_version"] = 1;
    report["trace"] = trace_csv_path;
    report["samples"] = tr.size();
    report["conditions"] = conditions_json(sc);

    const auto onset = trace_contact_onset(tr);
    if (!onset) throw NoContactError("trace has no contact event");
    report["onset_time"] = *onset;
    report["peak_force"] = peak_contact_force(tr);

    const SecondOrderParams& stage1 = sc.controller.stages[0].params;
    const double omega_a = stage1.omega();
    const ContactState state = contact_state_at_onset(tr, omega_a);
    report["contact_state"] = {{"sigma", state.sigma}, {"nu", state.nu},
                               {"eta", state.eta},     {"x_c", state.x_c},
                               {"v_c", state.v_c},     {"a_c", state.a_c}};

    // Closed-form free response of the first stage, compared over the first
    // sustained-contact span (the free solution only applies while the
    // virtual force is gone). Meaningful when the stage is critically damped.
    if (std::abs(stage1.zeta() - 1.0) <= 1e-9) {
      double horizon = std::min(tr.t.back(), *onset + 10.0 / omega_a);
      for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.t[k] > *onset && tr.gap[k] > 0.0) {
          horizon = std::min(horizon, tr.t[k]);
          break;
        }
      }
      double max_err = 0.0;
      for (std::size_t k = 0; k < tr.size(); ++k) {
        const double t = tr.t[k];
        if (t < *onset || t > horizon) continue;
        const ClosedFormY ref = closed_form_y(t - *onset, state, omega_a);
        max_err = std::max(max_err,
                           std::abs(tr.x_v[0][k] - tr.x_d[k] - ref.y));
      }
      report["closed_form_max_error"] = max_err;
      report["closed_form_window"] = {*onset, horizon};
    } else {
      report["closed_form_max_error"] = nullptr;
    }

    const auto contact_part = contact_part_params(sc.controller);
    if (contact_part) {
      TransitionClass cls;
      bool degenerate = false;
      try {
        cls = t_extremum(state, *contact_part, omega_a);
      } catch (const DegenerateInput&) {
        degenerate = true;
      }
      if (!degenerate) {
        const char* kind = "";
        switch (cls.kind) {
          case TransitionKind::local_maximum: kind = "local_maximum"; break;
          case TransitionKind::no_extremum_smooth: kind = "no_extremum_smooth"; break;
          case TransitionKind::local_minimum_possible:
            kind = "local_minimum_possible";
            break;
          case TransitionKind::trivial_t_ex_infinite:
            kind = "trivial_t_ex_infinite";
            break;
        }
        report["transition"] = {{"kind", kind},
                                {"t_ex", cls.t_ex ? json(*cls.t_ex) : json(nullptr)}};
      } else {
        report["transition"] = nullptr;
      }
      // Desired acceleration at onset, interpolated from the trace.
      double a_d0 = tr.a_d.front();
      if (tr.size() >= 2) {
        const std::size_t k = std::min(
            static_cast<std::size_t>((*onset - tr.t.front()) / tr.dt),
            tr.size() - 2);
        const double w = (*onset - tr.t[k]) / tr.dt;
        a_d0 = tr.a_d[k] + w * (tr.a_d[k + 1] - tr.a_d[k]);
      }
      const double predicted = initial_contact_force(
          sc.controller.terminal == TerminalKind::impedance ? sc.controller.law
                                                            : ImpedanceLaw::mi_equals_m,
          state, *contact_part, sc.plant_mass, a_d0);
      report["predicted_initial_contact_force"] = predicted;
    }

    if (sc.controller.terminal == TerminalKind::impedance &&
        sc.controller.law == ImpedanceLaw::full_feedforward &&
        sc.controller.stage_count() == 1) {
      report["superposition_residual"] = superposition_check(
          tr, sc.controller.stages[0].params, sc.controller.impedance);
    } else {
      report["superposition_residual"] = nullptr;
    }

    *out_json = dup_string(report.dump(2));
    return PI_OK;
  });
}

}  // extern "C"
