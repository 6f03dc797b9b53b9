#ifndef BBMB_H
#define BBMB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BbmbStatus {
  BbmbStatus_Ok = 0,
  BbmbStatus_NullPointer = 1,
  BbmbStatus_InvalidUtf8 = 2,
  BbmbStatus_InvalidConfig = 3,
  BbmbStatus_SolverFailure = 4,
  BbmbStatus_Io = 5,
  BbmbStatus_BufferTooSmall = 6,
} BbmbStatus;

/**
 * Opaque completed simulation.
 */
typedef struct BbmbRun BbmbRun;

/**
 * Opaque parsed scenario.
 */
typedef struct BbmbScenario BbmbScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message for the calling thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full length in bytes
 * excluding the NUL, or 0 if there is no pending error.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be NULL (query mode).
 */
uintptr_t bbmb_last_error(char *buf, uintptr_t len);

/**
 * Parses a scenario from `key = value` text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum BbmbStatus bbmb_scenario_parse(const char *text, struct BbmbScenario **out);

/**
 * Loads and parses a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum BbmbStatus bbmb_scenario_load(const char *path, struct BbmbScenario **out);

/**
 * Frees a scenario handle. NULL is a no-op.
 *
 * # Safety
 * `scenario` must come from `bbmb_scenario_*` and not be freed twice.
 */
void bbmb_scenario_free(struct BbmbScenario *scenario);

/**
 * Runs the scenario's simulation to completion.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be a valid pointer.
 */
enum BbmbStatus bbmb_run(const struct BbmbScenario *scenario, struct BbmbRun **out);

/**
 * Frees a run handle. NULL is a no-op.
 *
 * # Safety
 * `run` must come from `bbmb_run` and not be freed twice.
 */
void bbmb_run_free(struct BbmbRun *run);

/**
 * Number of recorded samples in a completed run.
 *
 * # Safety
 * `run` must be a live handle.
 */
uintptr_t bbmb_run_sample_count(const struct BbmbRun *run);

/**
 * Number of nodal values in the final state.
 *
 * # Safety
 * `run` must be a live handle.
 */
uintptr_t bbmb_run_state_len(const struct BbmbRun *run);

/**
 * Copies the recorded sample times into `buf`.
 *
 * # Safety
 * `run` must be live; `buf` must hold `len >= bbmb_run_sample_count` doubles.
 */
enum BbmbStatus bbmb_run_times(const struct BbmbRun *run, double *buf, uintptr_t len);

/**
 * Copies the recorded L2 norms into `buf`.
 *
 * # Safety
 * As for `bbmb_run_times`.
 */
enum BbmbStatus bbmb_run_l2(const struct BbmbRun *run, double *buf, uintptr_t len);

/**
 * Copies the final nodal state into `buf`.
 *
 * # Safety
 * `run` must be live; `buf` must hold `len >= bbmb_run_state_len` doubles.
 */
enum BbmbStatus bbmb_run_final_state(const struct BbmbRun *run, double *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BBMB_H */
