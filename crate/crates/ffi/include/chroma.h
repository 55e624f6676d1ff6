#ifndef CHROMA_H
#define CHROMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ChromaStatus {
  CHROMA_STATUS_OK = 0,
  CHROMA_STATUS_NULL_POINTER = 1,
  CHROMA_STATUS_INVALID_UTF8 = 2,
  CHROMA_STATUS_PARSE = 3,
  CHROMA_STATUS_INVALID = 4,
  /**
   * No solution exists (or none was found for the given limits).
   */
  CHROMA_STATUS_INFEASIBLE = 5,
  CHROMA_STATUS_LIMIT = 6,
  CHROMA_STATUS_INTERNAL = 7,
  CHROMA_STATUS_PANIC = 8,
} ChromaStatus;

/**
 * Opaque instance handle.
 */
typedef struct ChromaInstance ChromaInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON instance. On success `*out` holds a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ChromaStatus chroma_instance_from_json(const char *json, struct ChromaInstance **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `inst` must come from `chroma_instance_from_json` and not be used again.
 */
void chroma_instance_free(struct ChromaInstance *inst);

/**
 * Number of clients after color normalization; 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t chroma_instance_n_clients(const struct ChromaInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t chroma_instance_n_facilities(const struct ChromaInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t chroma_instance_gamma(const struct ChromaInstance *inst);

/**
 * Solves through partitions and cover-promise solvers. Writes the JSON
 * report to `*out_json` for both `Ok` and `Infeasible`.
 *
 * # Safety
 * `inst` must be a live handle and `out_json` a valid pointer.
 */
enum ChromaStatus chroma_solve_reduction(const struct ChromaInstance *inst,
                                         uint64_t seed,
                                         uint32_t reps,
                                         char **out_json);

/**
 * Seven-approximation for knapsack instances; `max_guesses` = 0 selects
 * the default limit.
 *
 * # Safety
 * `inst` must be a live handle and `out_json` a valid pointer.
 */
enum ChromaStatus chroma_solve_knapsack7(const struct ChromaInstance *inst,
                                         uint64_t max_guesses,
                                         char **out_json);

/**
 * Optimal radius by enumeration (at most 20 facilities).
 *
 * # Safety
 * `inst` must be a live handle and `out_radius` a valid pointer.
 */
enum ChromaStatus chroma_brute_force(const struct ChromaInstance *inst, uint64_t *out_radius);

/**
 * Whether facility indices `centers[0..n]` satisfy the constraint and all
 * requirements at `radius`.
 *
 * # Safety
 * `inst` must be a live handle, `centers` valid for `n` reads (or null when
 * `n` is 0) and `out_feasible` a valid pointer.
 */
enum ChromaStatus chroma_check_solution(const struct ChromaInstance *inst,
                                        const size_t *centers,
                                        size_t n,
                                        uint64_t radius,
                                        bool *out_feasible);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void chroma_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a call that
 * returned `Ok` or `Infeasible`.
 * Valid until the next call into the library from the same thread.
 */
const char *chroma_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chroma_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHROMA_H */
