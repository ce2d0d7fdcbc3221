/* Preimpact: serial combined impedance control simulation toolkit.
 *
 * C interface of the shared library. Handles are opaque; every function
 * returns a pi_status and reports details through pi_last_error(). All
 * handles are confined to the creating thread unless noted; independent
 * runs may execute concurrently.
 */
#ifndef PREIMPACT_H
#define PREIMPACT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pi_status {
  PI_OK = 0,
  PI_ERR_CONFIG = 2,     /* invalid configuration or input document */
  PI_ERR_NUMERIC = 3,    /* non-finite value during integration */
  PI_ERR_NO_CONTACT = 4, /* contact metric requested without a contact event */
  PI_ERR_INVALID_ARG = 5,
  PI_ERR_IO = 6,
} pi_status;

typedef struct pi_config pi_config; /* parsed + validated scenario */
typedef struct pi_run pi_run;       /* finished run: trace, diagnostics */

const char* pi_version(void);
const char* pi_status_name(pi_status status);

/* Message for the most recent failing call on this thread. */
const char* pi_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* The PREIMPACT_SEED environment variable, when set to a non-negative
 * integer, overrides the configured random seed in all loaders. */
pi_status pi_config_from_file(const char* path, pi_config** out);
pi_status pi_config_from_string(const char* text, pi_config** out);
/* Built-in defaults for scenario kind 'a'..'d'. */
pi_status pi_config_builtin(char scenario_kind, pi_config** out);
pi_status pi_config_clone(const pi_config* cfg, pi_config** out);
/* Dotted override, e.g. "gain.g_p" = "0.8" or "scenario.kind" = "\"c\"".
 * Bare words that are not numbers are taken as strings. */
pi_status pi_config_set(pi_config* cfg, const char* dotted_key, const char* value);
/* Resolved scenario as config text. */
pi_status pi_config_text(const pi_config* cfg, char** out_text);
pi_status pi_config_write(const pi_config* cfg, const char* path);
/* Resolved value of one key ("gain.g_p", "scenario.trials", ...) as text:
 * numbers with 17 significant digits, strings unquoted, booleans as
 * true/false. Free with pi_string_free. */
pi_status pi_config_get(const pi_config* cfg, const char* dotted_key,
                        char** out_value);
void pi_config_free(pi_config* cfg);

/* --- runs ----------------------------------------------------------------*/

pi_status pi_run_scenario(const pi_config* cfg, pi_run** out);
void pi_run_free(pi_run* run);

size_t pi_run_sample_count(const pi_run* run);
size_t pi_run_column_count(const pi_run* run);
const char* pi_run_column_name(const pi_run* run, size_t index);
/* Borrowed pointer into the run; valid until pi_run_free. */
pi_status pi_run_column(const pi_run* run, const char* name, const double** data,
                        size_t* length);
pi_status pi_run_write_trace_csv(const pi_run* run, const char* path);

/* Contact metrics. */
pi_status pi_run_peak_contact_force(const pi_run* run, double* peak);
pi_status pi_run_contact_onset_time(const pi_run* run, double* t_onset);
/* Diagnostics counters. */
pi_status pi_run_diag(const pi_run* run, size_t* sensor_signal_lost,
                      size_t* saturation_hits);

/* Per-run report (JSON text): metrics, condition verdicts, diagnostics.
 * Free with pi_string_free. */
pi_status pi_run_report_json(const pi_run* run, char** out_json);
void pi_string_free(char* text);

/* --- analysis ------------------------------------------------------------*/

/* Admittance-frequency design range [lo, hi) implied by the smooth-transition
 * condition. */
pi_status pi_design_range(double omega_i, double zeta_i, double* lo, double* hi);
pi_status pi_design_range_mdk(double M_i, double D_i, double K_i, double* lo,
                              double* hi);
/* verdict: 0 satisfied, 1 violated (omega_i too low), 2 violated (too high) */
pi_status pi_check_smooth_condition(double omega_i, double zeta_i, double omega_a,
                                    int* verdict);
/* Impact-reduction effect in percent from two mean peak forces. */
pi_status pi_reduction_effect(double baseline_mean, double case_mean, double* pct);
/* Mean and sample standard deviation of peak forces. */
pi_status pi_impact_stats(const double* peaks, size_t count, double* mean,
                          double* sd);

/* Re-derives the analysis checks from an emitted trace CSV under the given
 * configuration and returns a JSON report. Fails with PI_ERR_NO_CONTACT when
 * the trace has no contact event. */
pi_status pi_verify_trace(const pi_config* cfg, const char* trace_csv_path,
                          char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* PREIMPACT_H */
