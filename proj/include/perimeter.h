#ifndef PERIMETER_H
#define PERIMETER_H

/* C interface to the perimeter protocol engine and simulator. All functions
 * return 0 on success or a negative error code; the CLI links only against
 * this surface. Strings returned through out-parameters are heap-allocated
 * and must be released with perim_string_free(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PERIM_OK 0
#define PERIM_ERR_CONFIG (-1)   /* bad scenario/config input */
#define PERIM_ERR_TRACE (-2)    /* malformed trace input */
#define PERIM_ERR_ARG (-3)      /* null pointer or invalid argument */
#define PERIM_ERR_INTERNAL (-4)

typedef struct perim_scenario perim_scenario;

const char* perim_version(void);

/* Loads a scenario from a JSON file or a JSON string. On PERIM_ERR_CONFIG
 * the failure message names the offending key; fetch it with
 * perim_last_error(). */
int perim_scenario_load_file(const char* path, perim_scenario** out);
int perim_scenario_load_json(const char* json_text, perim_scenario** out);
void perim_scenario_free(perim_scenario* sc);

/* Applies a dotted-key override, e.g. "adversary.t_relay=0.002". */
int perim_scenario_override(perim_scenario* sc, const char* dotted_key, const char* value);

/* Runs one session. seed_override of 0 keeps the scenario's seed. Any of the
 * out-parameters may be NULL. *verdict_match is 1 when the verdict matches
 * the scenario's `expect` field (or the field is absent), else 0. */
int perim_run(const perim_scenario* sc, uint64_t seed_override, char** report_out,
              char** trace_out, int* verdict_match);

/* Monte Carlo over the scenario's `trials` field. */
int perim_monte_carlo(const perim_scenario* sc, uint64_t* trials, uint64_t* accepts,
                      uint64_t* reinits);

/* Guessing-game advantage estimate: empirical win rate over `trials`
 * sessions of `rounds` one-bit rounds, against the analytic 2^-rounds. */
int perim_advantage(uint64_t seed, int rounds, uint64_t trials, char** report_out,
                    double* advantage_out, double* z_out);

/* Checks the authentication hierarchy on a serialized trace; the report has
 * one line per property. *all_hold is 1 when every property holds. */
int perim_check_trace(const char* trace_text, const char* verifier, const char* prover,
                      char** report_out, int* all_hold);

/* Cartesian sweep; axes are "key=v1,v2,..." strings. Returns a TSV table. */
int perim_sweep(const perim_scenario* sc, const char* const* axes, size_t axis_count,
                char** table_out);

/* Message for the most recent failure on this thread. */
const char* perim_last_error(void);

void perim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PERIMETER_H */
