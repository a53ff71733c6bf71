#ifndef TARDYBATCH_H
#define TARDYBATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  TB_STATUS_PARSE_ERROR = 3,
  TB_STATUS_VALIDATION_ERROR = 4,
  TB_STATUS_IO_ERROR = 5,
  TB_STATUS_TOO_LARGE = 6,
  TB_STATUS_INVALID_ARGUMENT = 7,
  TB_STATUS_PANIC = 8,
} TbStatus;

// A validated problem instance.
typedef struct TbInstance TbInstance;

// An evaluated schedule.
typedef struct TbSolution TbSolution;

// Solver settings. Obtain defaults from `tb_solve_options_default`.
typedef struct TbSolveOptions {
  uint32_t max_iters;
  uint32_t pr_iters;
  // Absolute candidate-list size; 0 selects `rcl_fraction`.
  uint32_t rcl_size;
  // Candidate-list size as a fraction of the job count, in (0, 1].
  double rcl_fraction;
  double alpha;
  uint64_t seed;
  uint32_t threads;
  // Wall-clock cap in seconds; 0 disables it.
  double time_limit_secs;
} TbSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer stays
// valid until the next `tb_*` call on the same thread.
const char *tb_last_error_message(void);

// Library version as a static nul-terminated string.
const char *tb_version(void);

// Parses and validates an instance from JSON text.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum TbStatus tb_instance_from_json(const char *json, struct TbInstance **out);

// Loads and validates an instance file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum TbStatus tb_instance_load(const char *path, struct TbInstance **out);

// Generates a random instance with default ranges and capacity 40.
//
// # Safety
// `out` must be writable.
enum TbStatus tb_instance_generate(uint32_t n,
                                   double gamma,
                                   uint64_t seed,
                                   struct TbInstance **out);

// # Safety
// `instance` must be NULL or a handle from a `tb_instance_*` constructor that
// has not been freed.
void tb_instance_free(struct TbInstance *instance);

// Number of jobs, or 0 for NULL.
//
// # Safety
// `instance` must be NULL or a live handle.
uintptr_t tb_instance_job_count(const struct TbInstance *instance);

// Serializes the instance in the instance file format.
//
// # Safety
// `instance` must be a live handle; `out` must be writable.
enum TbStatus tb_instance_to_json(const struct TbInstance *instance, char **out);

struct TbSolveOptions tb_solve_options_default(void);

// Runs GRASP with path relinking. `options` may be NULL for defaults.
//
// # Safety
// `instance` must be a live handle, `options` NULL or readable, `out` writable.
enum TbStatus tb_solve(const struct TbInstance *instance,
                       const struct TbSolveOptions *options,
                       struct TbSolution **out);

// Evaluates a batch list given as JSON, e.g. `[[5,4,1],[3,2]]`.
//
// # Safety
// `instance` must be a live handle, `batches_json` a nul-terminated string,
// `out` writable.
enum TbStatus tb_evaluate(const struct TbInstance *instance,
                          const char *batches_json,
                          struct TbSolution **out);

// Exact optimum by exhaustive search; fails with `TOO_LARGE` above `limit`
// jobs.
//
// # Safety
// `instance` must be a live handle; `out_tardy` writable. `out_solution` may
// be NULL; otherwise it receives an optimal schedule.
enum TbStatus tb_oracle_optimum(const struct TbInstance *instance,
                                uint32_t limit,
                                uintptr_t *out_tardy,
                                struct TbSolution **out_solution);

// # Safety
// `solution` must be NULL or a live handle.
void tb_solution_free(struct TbSolution *solution);

// # Safety
// `solution` must be NULL or a live handle.
uintptr_t tb_solution_tardy_count(const struct TbSolution *solution);

// # Safety
// `solution` must be NULL or a live handle.
uint64_t tb_solution_makespan(const struct TbSolution *solution);

// # Safety
// `solution` must be NULL or a live handle.
uintptr_t tb_solution_batch_count(const struct TbSolution *solution);

// Serializes the solution in the solution file format.
//
// # Safety
// `solution` must be a live handle; `out` writable.
enum TbStatus tb_solution_to_json(const struct TbSolution *solution, char **out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void tb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TARDYBATCH_H */
