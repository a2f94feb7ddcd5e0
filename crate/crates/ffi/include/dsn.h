#ifndef DSN_H
#define DSN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; 1 to 4 agree with the exit codes of the `dsn` command.
 */
typedef enum DsnStatus {
  DSN_STATUS_OK = 0,
  DSN_STATUS_INFEASIBLE = 1,
  DSN_STATUS_PARSE_ERROR = 2,
  DSN_STATUS_INVALID_ARGUMENT = 3,
  DSN_STATUS_LIMIT_EXCEEDED = 4,
  DSN_STATUS_NULL_POINTER = 5,
  DSN_STATUS_PANIC = 6,
} DsnStatus;

/**
 * A parsed host graph with its demand pattern.
 */
typedef struct DsnInstance DsnInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *dsn_last_error(void);

/**
 * Parses instance JSON into a new handle stored in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsnStatus dsn_instance_from_json(const char *json, struct DsnInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a handle from `dsn_instance_from_json` not yet freed.
 */
void dsn_instance_free(struct DsnInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle or NULL.
 */
size_t dsn_instance_vertex_count(const struct DsnInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle or NULL.
 */
size_t dsn_instance_edge_count(const struct DsnInstance *inst);

/**
 * Optimum cost by exhaustive search.
 *
 * # Safety
 * `inst` must be a live handle and `cost` a valid pointer.
 */
enum DsnStatus dsn_oracle_cost(const struct DsnInstance *inst, uint64_t *cost);

/**
 * Optimum by the dynamic program with treewidth bound `omega` (0 picks the default).
 * On success `*solution_json` holds `{"cost":..,"edges":[..]}`, to be released with
 * `dsn_string_free`; `solution_json` may be NULL.
 *
 * # Safety
 * `inst` must be a live handle; `cost` a valid pointer; `solution_json` NULL or valid.
 */
enum DsnStatus dsn_solve(const struct DsnInstance *inst,
                         size_t omega,
                         uint64_t *cost,
                         char **solution_json);

/**
 * Sets `*member` to 1 when the pattern lies in C_{λ,δ} (C*_{λ,δ} if `star`), else 0.
 *
 * # Safety
 * `inst` must be a live handle and `member` a valid pointer.
 */
enum DsnStatus dsn_classify(const struct DsnInstance *inst,
                            size_t lambda,
                            size_t delta,
                            bool star,
                            int32_t *member);

/**
 * Runs the `dsn` command line on the arguments `argv[0..argc]` (no program name) and
 * returns its exit code. The captured streams go to `*out` and `*err` when those are
 * not NULL; release them with `dsn_string_free`.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `out` and `err` NULL or valid.
 */
int32_t dsn_run(size_t argc, const char *const *argv, char **out, char **err);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void dsn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSN_H */
