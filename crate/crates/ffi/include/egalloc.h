#ifndef EGALLOC_H
#define EGALLOC_H

/* Generated by cbindgen from egalloc-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum EgalStatus {
  // Success.
  EGAL_STATUS_OK = 0,
  // A required pointer argument was null.
  EGAL_STATUS_NULL_ARGUMENT = 1,
  // Input text was not valid UTF-8.
  EGAL_STATUS_UTF8 = 2,
  // Instance or vector text failed to parse.
  EGAL_STATUS_PARSE = 3,
  // Parsed input violated a model invariant.
  EGAL_STATUS_VALIDATION = 4,
  // A configuration value was rejected.
  EGAL_STATUS_CONFIG = 5,
  // The exact solver's enumeration budget was exceeded.
  EGAL_STATUS_BUDGET = 6,
  // A sum-constrained vector could not be renormalized.
  EGAL_STATUS_RENORMALIZE = 7,
  // An I/O error occurred.
  EGAL_STATUS_IO = 8,
  // A buffer was too small for the result.
  EGAL_STATUS_BUFFER_TOO_SMALL = 9,
  // An internal panic was caught at the boundary.
  EGAL_STATUS_INTERNAL_PANIC = 10,
} EgalStatus;

// Opaque handle to a validated problem instance.
typedef struct EgalInstance EgalInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The crate version as a static C string.
const char *egal_version(void);

// The last error message on this thread; empty until an error occurs.
// Valid until the next failing egalloc call on the same thread.
const char *egal_last_error(void);

// Parse and validate instance text (see the instance file format).
//
// On success writes a heap-allocated handle to `out`; release it with
// [`egal_instance_free`]. `sum_tolerance` bounds row-sum deviation in
// limited mode.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum EgalStatus egal_instance_parse(const char *text,
                                    double sum_tolerance,
                                    struct EgalInstance **out);

// Release a handle returned by [`egal_instance_parse`]. Null is a no-op.
//
// # Safety
// `inst` must be null or a pointer from [`egal_instance_parse`] that has
// not been freed yet.
void egal_instance_free(struct EgalInstance *inst);

// Number of agents in the instance; 0 if `inst` is null.
//
// # Safety
// `inst` must be null or a live handle.
size_t egal_instance_agents(const struct EgalInstance *inst);

// Number of resources in the instance; 0 if `inst` is null.
//
// # Safety
// `inst` must be null or a live handle.
size_t egal_instance_resources(const struct EgalInstance *inst);

// Solve the instance exactly; 0 disables the enumeration budget cap.
//
// Writes the owner of each resource (0-based agent indices) to
// `owners_out` and the max-min welfare to `welfare_out`.
//
// # Safety
// `inst` must be a live handle, `owners_out` must hold at least
// `owners_len` entries with `owners_len >= egal_instance_resources(inst)`,
// and `welfare_out` must be valid.
enum EgalStatus egal_solve_exact(const struct EgalInstance *inst,
                                 uint64_t budget,
                                 size_t *owners_out,
                                 size_t owners_len,
                                 double *welfare_out);

// Solve the instance with the genetic solver (other knobs at defaults).
//
// # Safety
// Same buffer contract as [`egal_solve_exact`].
enum EgalStatus egal_solve_llga(const struct EgalInstance *inst,
                                size_t population,
                                size_t generations,
                                uint64_t seed,
                                size_t *owners_out,
                                size_t owners_len,
                                double *welfare_out);

// Profit the liar gains by reporting `lie` instead of its truth, under
// the exact solver. `lie_len` must equal the resource count.
//
// # Safety
// `inst` must be a live handle, `lie` must hold `lie_len` doubles, and
// `profit_out` must be valid.
enum EgalStatus egal_lie_profit(const struct EgalInstance *inst,
                                const double *lie,
                                size_t lie_len,
                                double *profit_out);

// Closed-form optimal lie for an unlimited instance: a uniform scaling of
// the truth that keeps the liar just above every rival entry. Writes the
// lie to `lie_out` and the scale factor to `c_out` (may be null).
//
// # Safety
// `inst` must be a live handle and `lie_out` must hold at least `lie_len
// >= egal_instance_resources(inst)` doubles.
enum EgalStatus egal_optimal_lie_unlimited(const struct EgalInstance *inst,
                                           double *lie_out,
                                           size_t lie_len,
                                           double *c_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EGALLOC_H */
