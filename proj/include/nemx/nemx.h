/* nemx: co-optimization of flexible demand and behind-the-meter storage
 * under net-metering tariffs.
 *
 * Every function returning nemx_status leaves a message retrievable with
 * nemx_last_error() on failure (per thread). Strings returned through char**
 * are owned by the caller and released with nemx_string_free().
 */
#ifndef NEMX_NEMX_H
#define NEMX_NEMX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NEMX_BUILDING)
#    define NEMX_API __declspec(dllexport)
#  else
#    define NEMX_API __declspec(dllimport)
#  endif
#else
#  define NEMX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nemx_status {
  NEMX_OK = 0,
  NEMX_E_INVALID_ARGUMENT = 1,
  NEMX_E_CONFIG = 2,
  NEMX_E_DOMAIN = 3,
  NEMX_E_RANGE = 4,
  NEMX_E_SANDWICH = 5,
  NEMX_E_INFEASIBLE_TARGET = 6,
  NEMX_E_CALIBRATION = 7,
  NEMX_E_ORACLE_SCALE = 8,
  NEMX_E_NO_INTERIOR_POINT = 9,
  NEMX_E_PROBE_FAILED = 10,
  NEMX_E_UNDEFINED_RATIO = 11,
  NEMX_E_GAIN_UNDEFINED = 12,
  NEMX_E_SWEEP = 13,
  NEMX_E_IO = 14,
  NEMX_E_INTERNAL = 99
} nemx_status;

typedef struct nemx_scenario nemx_scenario;

NEMX_API const char* nemx_version(void);
NEMX_API const char* nemx_last_error(void);
NEMX_API void nemx_string_free(char* s);

/* Load a JSON scenario config. When has_seed is nonzero, seed replaces the
 * config's seed for synthetic traces and sampling. */
NEMX_API nemx_status nemx_scenario_load(const char* path, int has_seed, uint64_t seed,
                                        nemx_scenario** out);
/* Same from a JSON string; relative trace paths resolve against base_dir. */
NEMX_API nemx_status nemx_scenario_parse(const char* json_text, const char* base_dir,
                                         int has_seed, uint64_t seed, nemx_scenario** out);
NEMX_API void nemx_scenario_free(nemx_scenario* scenario);

NEMX_API uint64_t nemx_scenario_seed(const nemx_scenario* scenario);
NEMX_API size_t nemx_scenario_horizon(const nemx_scenario* scenario);

/* Interval arguments: t < 0 selects the config's analysis interval. */

/* delta_plus, sigma_plus, sigma_plus_o, sigma_minus_o, sigma_minus,
 * delta_minus. Fails with NEMX_E_SANDWICH when the salvage sandwich fails. */
NEMX_API nemx_status nemx_thresholds(const nemx_scenario* scenario, long t, double out[6]);
NEMX_API nemx_status nemx_thresholds_json(const nemx_scenario* scenario, long t, char** out);

/* Decisions of the config's customer type at each generation value; with
 * count == 0 the config's analysis.g values are used. */
NEMX_API nemx_status nemx_decide_json(const nemx_scenario* scenario, const double* g,
                                      size_t count, long t, char** out);

NEMX_API nemx_status nemx_rank_json(const nemx_scenario* scenario, long t, char** out);

/* Net-zero zones of the four solar types with sweep confirmation.
 * *pass is nonzero when the length identity, the ordering, and the sweeps
 * all hold. */
NEMX_API nemx_status nemx_zones_json(const nemx_scenario* scenario, long t, char** out,
                                     int* pass);

/* Comparative-statics cells as CSV; *pass is nonzero when every determinate
 * cell reproduces its expected sign. */
NEMX_API nemx_status nemx_statics_csv(const nemx_scenario* scenario, long t, char** out,
                                      int* pass);

/* Oracle certification. samples == 0 and resolution <= 0 select the
 * config's values. */
NEMX_API nemx_status nemx_verify_json(const nemx_scenario* scenario, long t, size_t samples,
                                      double resolution, char** out, int* pass);

/* Runs the config's customer type over its traces. report gets JSON totals
 * and metrics; intervals (optional, may be NULL) gets per-interval CSV. */
NEMX_API nemx_status nemx_simulate(const nemx_scenario* scenario, char** report,
                                   char** intervals);

NEMX_API nemx_status nemx_compare_csv(const nemx_scenario* scenario, char** out);

/* Value-of-storage sweep from the config's sweep block. */
NEMX_API nemx_status nemx_sweep_csv(const nemx_scenario* scenario, char** out);

/* Synthetic or loaded traces as CSV. */
NEMX_API nemx_status nemx_traces_csv(const nemx_scenario* scenario, char** out);

/* Stateless helpers. */
NEMX_API double nemx_payment(double buy, double export_rate, double fixed, double z);
NEMX_API nemx_status nemx_soc_step(double soc, double e, double charge_limit,
                                   double discharge_limit, double charge_eff,
                                   double discharge_eff, double* out);

#ifdef __cplusplus
}
#endif

#endif /* NEMX_NEMX_H */
