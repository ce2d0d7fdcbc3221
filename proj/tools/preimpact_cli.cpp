// Command-line front end over the preimpact C API.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "preimpact.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code(pi_status status) {
  switch (status) {
    case PI_OK: return 0;
    case PI_ERR_CONFIG: return 2;
    case PI_ERR_NUMERIC: return 3;
    case PI_ERR_NO_CONTACT: return 4;
    default: return 1;
  }
}

[[noreturn]] void die(pi_status status, const std::string& context) {
  std::cerr << "error: " << context << ": " << pi_last_error() << "\n";
  std::exit(exit_code(status));
}

struct ConfigHandle {
  pi_config* ptr = nullptr;
  ~ConfigHandle() { pi_config_free(ptr); }
  ConfigHandle() = default;
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
  ConfigHandle(ConfigHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
};

struct RunHandle {
  pi_run* ptr = nullptr;
  ~RunHandle() { pi_run_free(ptr); }
  RunHandle() = default;
  RunHandle(const RunHandle&) = delete;
  RunHandle& operator=(const RunHandle&) = delete;
  RunHandle(RunHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  RunHandle& operator=(RunHandle&& other) noexcept {
    std::swap(ptr, other.ptr);
    return *this;
  }
};

std::string take_string(char* text) {
  std::string out = text ? text : "";
  pi_string_free(text);
  return out;
}

ConfigHandle load_config(const std::string& config_path, const std::string& scenario,
                         const std::vector<std::string>& sets) {
  ConfigHandle cfg;
  pi_status st = PI_OK;
  if (!config_path.empty()) {
    st = pi_config_from_file(config_path.c_str(), &cfg.ptr);
    if (st != PI_OK) die(st, "loading " + config_path);
  } else if (!scenario.empty()) {
    st = pi_config_builtin(scenario[0], &cfg.ptr);
    if (st != PI_OK) die(st, "building scenario " + scenario);
  } else {
    std::cerr << "error: give --config or --scenario\n";
    std::exit(2);
  }
  for (const std::string& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      std::exit(2);
    }
    st = pi_config_set(cfg.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != PI_OK) die(st, "applying --set " + kv);
  }
  // Surface composite validation problems now rather than mid-run.
  char* text = nullptr;
  st = pi_config_text(cfg.ptr, &text);
  if (st != PI_OK) die(st, "validating configuration");
  pi_string_free(text);
  return cfg;
}

double get_number(const pi_config* cfg, const char* key) {
  char* text = nullptr;
  const pi_status st = pi_config_get(cfg, key, &text);
  if (st != PI_OK) die(st, std::string("reading ") + key);
  return std::stod(take_string(text));
}

std::string get_text(const pi_config* cfg, const char* key) {
  char* text = nullptr;
  const pi_status st = pi_config_get(cfg, key, &text);
  if (st != PI_OK) die(st, std::string("reading ") + key);
  return take_string(text);
}

struct TrialSet {
  std::vector<RunHandle> runs;
  std::vector<double> peaks;  // empty when any trial lacks contact
  double mean = 0.0;
  double sd = 0.0;
  bool contact = false;
};

/// Executes `trials` runs, bumping the seed per trial. propagate_errors: exits
/// via die() on failure.
TrialSet run_trials(const pi_config* base) {
  const int trials = static_cast<int>(get_number(base, "scenario.trials"));
  const double seed = get_number(base, "scenario.seed");

  TrialSet out;
  for (int i = 0; i < trials; ++i) {
    ConfigHandle trial_cfg;
    pi_status st = pi_config_clone(base, &trial_cfg.ptr);
    if (st != PI_OK) die(st, "cloning configuration");
    if (trials > 1) {
      const std::string s = std::to_string(static_cast<long long>(seed) + i);
      st = pi_config_set(trial_cfg.ptr, "scenario.seed", s.c_str());
      if (st != PI_OK) die(st, "setting trial seed");
    }
    RunHandle run;
    st = pi_run_scenario(trial_cfg.ptr, &run.ptr);
    if (st != PI_OK) die(st, "running scenario");
    out.runs.push_back(std::move(run));
  }

  out.contact = true;
  for (const RunHandle& run : out.runs) {
    double peak = 0.0;
    const pi_status st = pi_run_peak_contact_force(run.ptr, &peak);
    if (st == PI_ERR_NO_CONTACT) {
      out.contact = false;
      out.peaks.clear();
      break;
    }
    if (st != PI_OK) die(st, "reading peak force");
    out.peaks.push_back(peak);
  }
  if (out.contact) {
    pi_impact_stats(out.peaks.data(), out.peaks.size(), &out.mean, &out.sd);
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& scenario,
            const std::vector<std::string>& sets, const std::string& out_dir,
            bool require_contact, bool no_baseline) {
  ConfigHandle cfg = load_config(config_path, scenario, sets);
  fs::create_directories(out_dir);

  TrialSet trials = run_trials(cfg.ptr);

  json report;
  {
    char* text = nullptr;
    const pi_status st = pi_run_report_json(trials.runs.front().ptr, &text);
    if (st != PI_OK) die(st, "building report");
    report = json::parse(take_string(text));
  }

  std::vector<std::string> trace_paths;
  for (std::size_t i = 0; i < trials.runs.size(); ++i) {
    const std::string name =
        trials.runs.size() == 1 ? "trace.csv" : "trace_" + std::to_string(i + 1) + ".csv";
    const std::string path = (fs::path(out_dir) / name).string();
    const pi_status st = pi_run_write_trace_csv(trials.runs[i].ptr, path.c_str());
    if (st != PI_OK) die(st, "writing " + path);
    trace_paths.push_back(path);
  }
  report["traces"] = trace_paths;

  const std::string resolved = (fs::path(out_dir) / "resolved_config.toml").string();
  if (pi_status st = pi_config_write(cfg.ptr, resolved.c_str()); st != PI_OK) {
    die(st, "writing " + resolved);
  }
  report["resolved_config"] = resolved;

  if (trials.contact) {
    report["metrics"] = {{"peaks", trials.peaks},
                         {"mean_peak_force", trials.mean},
                         {"sd_peak_force", trials.sd}};
  } else {
    report["metrics"] = nullptr;
    if (require_contact) {
      std::cerr << "error: no contact event in the trace\n";
      return 4;
    }
  }

  // Paired no-reduction baseline for the reduction effect.
  const double g_p = get_number(cfg.ptr, "gain.g_p");
  const bool want_baseline =
      !no_baseline && get_text(cfg.ptr, "report.baseline") == "true" && g_p != 0.0;
  if (want_baseline && trials.contact) {
    ConfigHandle base_cfg;
    pi_status st = pi_config_clone(cfg.ptr, &base_cfg.ptr);
    if (st != PI_OK) die(st, "cloning baseline configuration");
    st = pi_config_set(base_cfg.ptr, "gain.g_p", "0");
    if (st != PI_OK) die(st, "disabling reduction for the baseline");
    TrialSet baseline = run_trials(base_cfg.ptr);
    const std::string bpath = (fs::path(out_dir) / "trace_baseline.csv").string();
    if ((st = pi_run_write_trace_csv(baseline.runs.front().ptr, bpath.c_str())) != PI_OK) {
      die(st, "writing " + bpath);
    }
    report["baseline_trace"] = bpath;
    if (baseline.contact) {
      double effect = 0.0;
      pi_reduction_effect(baseline.mean, trials.mean, &effect);
      report["metrics"]["baseline_mean_peak_force"] = baseline.mean;
      report["metrics"]["reduction_effect_pct"] = effect;
    }
  }

  const std::string report_path = (fs::path(out_dir) / "report.json").string();
  std::ofstream rep(report_path);
  rep << report.dump(2) << "\n";
  if (!rep) {
    std::cerr << "error: cannot write " << report_path << "\n";
    return 1;
  }

  std::cout << "run: " << trace_paths.front() << "\n";
  if (trials.contact) {
    std::cout << "  peak contact force: " << trials.mean << " N";
    if (trials.runs.size() > 1) std::cout << " (sd " << trials.sd << ")";
    std::cout << "\n";
    if (report["metrics"].contains("reduction_effect_pct")) {
      std::cout << "  reduction effect:   "
                << report["metrics"]["reduction_effect_pct"].get<double>() << " %\n";
    }
  } else {
    std::cout << "  no contact event\n";
  }
  const auto& cond = report["conditions"];
  if (cond.contains("smooth_condition") && !cond["smooth_condition"].is_null()) {
    const std::string verdict = cond["smooth_condition"].get<std::string>();
    std::cout << "  smooth-transition condition: " << verdict;
    if (verdict != "satisfied") std::cout << " (warning)";
    std::cout << "\n";
  }
  std::cout << "  report: " << report_path << "\n";
  return 0;
}

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

int cmd_sweep(const std::string& config_path, const std::string& scenario,
              const std::vector<std::string>& sets,
              const std::vector<std::string>& grid_specs, const std::string& out_dir,
              unsigned jobs) {
  ConfigHandle base = load_config(config_path, scenario, sets);
  fs::create_directories(out_dir);

  std::vector<GridAxis> axes;
  for (const std::string& spec : grid_specs) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      std::cerr << "error: --grid expects key=v1,v2,..., got '" << spec << "'\n";
      return 2;
    }
    GridAxis axis;
    axis.key = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const std::size_t comma = rest.find(',', start);
      const std::string v =
          rest.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      if (v.empty()) {
        std::cerr << "error: empty value in --grid " << spec << "\n";
        return 2;
      }
      axis.values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    axes.push_back(std::move(axis));
  }

  const std::string csv_path = (fs::path(out_dir) / "sweep.csv").string();

  std::size_t total = axes.empty() ? 0 : 1;
  for (const GridAxis& a : axes) total *= a.values.size();

  struct Row {
    std::vector<std::string> coords;
    bool contact = false;
    double mean = 0.0, sd = 0.0;
    std::optional<double> onset;
  };
  std::vector<Row> rows(total);

  std::atomic<std::size_t> next{0};
  std::atomic<int> failure{0};
  std::mutex err_mutex;
  std::string first_error;

  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total || failure.load() != 0) return;
      // Decode idx into grid coordinates (row-major over the axes).
      std::vector<std::size_t> coord(axes.size());
      std::size_t rem = idx;
      for (std::size_t a = axes.size(); a-- > 0;) {
        coord[a] = rem % axes[a].values.size();
        rem /= axes[a].values.size();
      }
      ConfigHandle cfg;
      pi_status st = pi_config_clone(base.ptr, &cfg.ptr);
      for (std::size_t a = 0; a < axes.size() && st == PI_OK; ++a) {
        st = pi_config_set(cfg.ptr, axes[a].key.c_str(), axes[a].values[coord[a]].c_str());
      }
      Row row;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        row.coords.push_back(axes[a].values[coord[a]]);
      }
      if (st == PI_OK) {
        char* text = nullptr;  // validate the grid point before running
        st = pi_config_text(cfg.ptr, &text);
        pi_string_free(text);
      }
      RunHandle run;
      if (st == PI_OK) st = pi_run_scenario(cfg.ptr, &run.ptr);
      if (st != PI_OK) {
        int expected = 0;
        if (failure.compare_exchange_strong(expected, exit_code(st))) {
          std::lock_guard<std::mutex> lock(err_mutex);
          first_error = pi_last_error();
        }
        return;
      }
      double peak = 0.0;
      if (pi_run_peak_contact_force(run.ptr, &peak) == PI_OK) {
        row.contact = true;
        row.mean = peak;
        double onset = 0.0;
        if (pi_run_contact_onset_time(run.ptr, &onset) == PI_OK) row.onset = onset;
      }
      rows[idx] = std::move(row);
    }
  };

  if (total > 0) {
    const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, total));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure.load() != 0) {
    std::cerr << "error: sweep run failed: " << first_error << "\n";
    return failure.load();
  }

  // Sorted by grid coordinates: numeric when both parse, lexical otherwise.
  auto coord_less = [](const Row& lhs, const Row& rhs) {
    for (std::size_t i = 0; i < lhs.coords.size(); ++i) {
      const std::string& a = lhs.coords[i];
      const std::string& b = rhs.coords[i];
      char* ea = nullptr;
      char* eb = nullptr;
      const double na = std::strtod(a.c_str(), &ea);
      const double nb = std::strtod(b.c_str(), &eb);
      const bool numeric = ea && *ea == '\0' && eb && *eb == '\0';
      if (numeric) {
        if (na != nb) return na < nb;
      } else if (a != b) {
        return a < b;
      }
    }
    return false;
  };
  std::stable_sort(rows.begin(), rows.end(), coord_less);

  std::ofstream csv(csv_path);
  for (const GridAxis& a : axes) csv << a.key << ",";
  csv << "peak_force,onset_time\n";
  for (const Row& row : rows) {
    for (const std::string& c : row.coords) csv << c << ",";
    if (row.contact) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g,", row.mean);
      csv << buf;
      if (row.onset) {
        std::snprintf(buf, sizeof buf, "%.17g", *row.onset);
        csv << buf;
      }
      csv << "\n";
    } else {
      csv << ",\n";
    }
  }
  if (!csv) {
    std::cerr << "error: cannot write " << csv_path << "\n";
    return 1;
  }
  std::cout << "sweep: " << total << " runs -> " << csv_path << "\n";
  return 0;
}

int cmd_design(double omega_i, double zeta_i, double M, double D, double K) {
  double lo = 0.0, hi = 0.0;
  pi_status st;
  if (M > 0.0 || D > 0.0 || K > 0.0) {
    st = pi_design_range_mdk(M, D, K, &lo, &hi);
  } else {
    st = pi_design_range(omega_i, zeta_i, &lo, &hi);
  }
  if (st != PI_OK) die(st, "design range");
  std::printf("omega_a design range: [%.10g, %.10g) rad/s\n", lo, hi);
  std::printf("  1. keep the contact part's parameters as designed for the task\n");
  std::printf("  2. pick omega_a inside the range and set zeta_a = 1 (critical damping)\n");
  std::printf("  3. tune g_p for the task; the gain has no closed-form design rule yet\n");
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& scenario,
               const std::vector<std::string>& sets, const std::string& trace_path) {
  ConfigHandle cfg = load_config(config_path, scenario, sets);
  char* text = nullptr;
  const pi_status st = pi_verify_trace(cfg.ptr, trace_path.c_str(), &text);
  if (st != PI_OK) die(st, "verifying " + trace_path);
  std::cout << take_string(text) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preemptive impact reduction / contact impedance simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir = "out", trace_path;
  std::vector<std::string> sets, grids;
  bool require_contact = false, no_baseline = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  double omega_i = 0.0, zeta_i = 0.0, M = 0.0, D = 0.0, K = 0.0;

  auto add_config_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Scenario config file");
    cmd->add_option("--scenario", scenario, "Built-in scenario kind (a|b|c|d)")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    cmd->add_option("--set", sets, "Override key=value (repeatable)");
  };

  CLI::App* run = app.add_subcommand("run", "Execute one scenario");
  add_config_opts(run);
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--require-contact", require_contact,
                "Fail with exit code 4 when no contact occurs");
  run->add_flag("--no-baseline", no_baseline, "Skip the paired g_p = 0 baseline run");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  add_config_opts(sweep);
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--grid", grids, "Grid axis key=v1,v2,... (repeatable)");
  sweep->add_option("--jobs", jobs, "Concurrent runs");

  CLI::App* design = app.add_subcommand("design", "Admittance-frequency design helper");
  design->add_option("--omega-i", omega_i, "Contact-part natural frequency [rad/s]");
  design->add_option("--zeta-i", zeta_i, "Contact-part damping ratio");
  design->add_option("--M", M, "Contact-part inertia [kg]");
  design->add_option("--D", D, "Contact-part viscosity [N*s/m]");
  design->add_option("--K", K, "Contact-part stiffness [N/m]");

  CLI::App* verify = app.add_subcommand("verify", "Re-derive analysis checks from a trace");
  add_config_opts(verify);
  verify->add_option("--trace", trace_path, "Trace CSV emitted by run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, scenario, sets, out_dir, require_contact, no_baseline);
    }
    if (sweep->parsed()) {
      return cmd_sweep(config_path, scenario, sets, grids, out_dir, jobs);
    }
    if (design->parsed()) return cmd_design(omega_i, zeta_i, M, D, K);
    if (verify->parsed()) return cmd_verify(config_path, scenario, sets, trace_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
