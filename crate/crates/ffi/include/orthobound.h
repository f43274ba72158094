/* C interface for orthobound: certified stable-set bounds for
 * orthogonality graphs and binary codes with forbidden distances.
 *
 * Maintained alongside crates/ffi/src/lib.rs; the crate's `header_sync`
 * test keeps declarations and exported symbols in step.
 *
 * Memory rules:
 *   - ObReport handles are released with ob_report_free().
 *   - char* results are released with ob_string_free().
 *   - Out-parameters are written only when the call returns OB_OK.
 */

#ifndef ORTHOBOUND_H
#define ORTHOBOUND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ObStatus {
  OB_OK = 0,
  OB_INVALID_ARGUMENT = 1,
  OB_LIMIT_EXCEEDED = 2,
  OB_SOLVER_FAILURE = 3,
  OB_FORMAT_ERROR = 4,
  OB_CHAIN_VIOLATION = 5,
  OB_IO_ERROR = 6,
  OB_NULL_POINTER = 7,
  OB_PANIC = 8,
} ObStatus;

/* Interior-point solver options. Zero/invalid fields fall back to the
 * defaults reported by ob_solver_options_default(). */
typedef struct ObSolverOptions {
  double tolerance;        /* relative duality-gap target (default 1e-8) */
  double feasibility_tol;  /* residual target (default 1e-8)             */
  uint32_t max_iterations; /* default 200                                */
  double step_damping;     /* fraction-to-boundary factor (default 0.98) */
  int32_t extended_precision; /* nonzero: double-double arithmetic       */
  int32_t equilibrate;        /* nonzero: pre-solve scaling (default on) */
} ObSolverOptions;

/* Opaque bound report. */
typedef struct ObReport ObReport;

/* Library version, static NUL-terminated string. */
const char *ob_version(void);

ObStatus ob_solver_options_default(ObSolverOptions *out);

/* Computes one bound for word length n.
 *
 * method: "lower" | "ratio" | "delsarte" | "schrijver" | "laurent".
 * forbidden/forbidden_len: forbidden Hamming distances; pass NULL/0 for
 * the distance-n/2 default (n must then be a multiple of 4).
 * options: may be NULL for defaults.
 * On OB_OK, *out_report owns the result. */
ObStatus ob_bound_compute(uint32_t n, const char *method,
                          const uint32_t *forbidden, size_t forbidden_len,
                          const ObSolverOptions *options,
                          ObReport **out_report);

/* Bound value (NaN if report is NULL). */
double ob_report_value(const ObReport *report);

/* Largest admissible stable-set size implied by the bound. */
ObStatus ob_report_refinement(const ObReport *report, uint64_t *out);

/* Solver iterations behind the report (0 for exact methods). */
uint64_t ob_report_iterations(const ObReport *report);

/* Full report as JSON (schema orthobound.bound_report.v1); free with
 * ob_string_free(). Returns NULL if report is NULL. */
char *ob_report_json(const ObReport *report);

void ob_report_free(ObReport *report);
void ob_string_free(char *s);

/* Exact helpers for the distance-n/2 graph on n-bit words (n % 4 == 0). */
ObStatus ob_lower_bound_size(uint32_t n, uint64_t *out);
ObStatus ob_ratio_bound_floor(uint32_t n, uint64_t *out);

/* ceil(2^n / alpha_upper): lower bound on the chromatic number. */
ObStatus ob_chromatic_lower_bound(uint32_t n, uint64_t alpha_upper,
                                  uint64_t *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ORTHOBOUND_H */
