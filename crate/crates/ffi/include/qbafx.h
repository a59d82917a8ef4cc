#ifndef QBAFX_H
#define QBAFX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QbafxKind {
  QBAFX_KIND_ARGUMENTS = 0,
  QBAFX_KIND_RELATIONS = 1,
} QbafxKind;

typedef enum QbafxMethod {
  QBAFX_METHOD_REMOVAL = 0,
  QBAFX_METHOD_SHAPLEY_EXACT = 1,
  QBAFX_METHOD_SHAPLEY_SAMPLED = 2,
} QbafxMethod;

typedef enum QbafxStatus {
  QBAFX_STATUS_OK = 0,
  QBAFX_STATUS_NULL_POINTER = 1,
  QBAFX_STATUS_INVALID_UTF8 = 2,
  // Malformed or inconsistent input: JSON, CSV, ids, config values.
  QBAFX_STATUS_INVALID_INPUT = 3,
  QBAFX_STATUS_NON_CONVERGENCE = 4,
  QBAFX_STATUS_TOO_LARGE_FOR_EXACT = 5,
  // A Rust panic was caught at the boundary.
  QBAFX_STATUS_INTERNAL = 6,
} QbafxStatus;

// Opaque framework handle.
typedef struct QbafxQbaf QbafxQbaf;

typedef struct QbafxSolverConfig {
  double tolerance;
  size_t max_iterations;
} QbafxSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL after a
// success. Valid until the next `qbafx_*` call on the same thread.
const char *qbafx_last_error_message(void);

struct QbafxSolverConfig qbafx_solver_config_default(void);

// Parses a framework from its JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QbafxStatus qbafx_qbaf_from_json(const char *json, struct QbafxQbaf **out);

// Induces a framework from `source,object,value` report CSV.
//
// # Safety
// `csv` must be a NUL-terminated string; `out` must be writable.
enum QbafxStatus qbafx_qbaf_from_reports_csv(const char *csv, struct QbafxQbaf **out);

// # Safety
// `h` must be NULL or a handle returned by this library, not yet freed.
void qbafx_qbaf_free(struct QbafxQbaf *h);

// # Safety
// `h` must be a live handle or NULL (which yields 0).
size_t qbafx_qbaf_num_arguments(const struct QbafxQbaf *h);

// # Safety
// `h` must be a live handle or NULL (which yields 0).
size_t qbafx_qbaf_num_edges(const struct QbafxQbaf *h);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum QbafxStatus qbafx_qbaf_to_json(const struct QbafxQbaf *h, char **out);

// Solves the framework and writes `argument,strength` CSV to `out`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum QbafxStatus qbafx_solve_csv(const struct QbafxQbaf *h,
                                 struct QbafxSolverConfig cfg,
                                 char **out);

// Solves the framework and writes the strength of `argument` to `out`.
//
// # Safety
// `h` must be a live handle, `argument` a NUL-terminated string and `out`
// writable.
enum QbafxStatus qbafx_strength(const struct QbafxQbaf *h,
                                struct QbafxSolverConfig cfg,
                                const char *argument,
                                double *out);

// Attribution report for `topic` as CSV. `samples` and `seed` are used
// only by `QBAFX_METHOD_SHAPLEY_SAMPLED`.
//
// # Safety
// `h` must be a live handle, `topic` a NUL-terminated string and `out`
// writable.
enum QbafxStatus qbafx_explain_csv(const struct QbafxQbaf *h,
                                   struct QbafxSolverConfig cfg,
                                   const char *topic,
                                   enum QbafxKind kind,
                                   enum QbafxMethod method,
                                   size_t samples,
                                   uint64_t seed,
                                   char **out);

// Renders an attribution CSV (as produced by `qbafx_explain_csv`) over the
// framework as Graphviz DOT.
//
// # Safety
// `h` must be a live handle, `report_csv` a NUL-terminated string and `out`
// writable.
enum QbafxStatus qbafx_render_dot(const struct QbafxQbaf *h,
                                  const char *report_csv,
                                  double negligible_threshold,
                                  char **out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void qbafx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBAFX_H */
