/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CMDP_FFI_H
#define CMDP_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum CmdpStatus {
  CMDP_STATUS_OK = 0,
  // A required pointer argument was null.
  CMDP_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  CMDP_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON, invalid instance, unknown method or bad parameter.
  CMDP_STATUS_INVALID_INPUT = 3,
  // The quality constraints cannot be met.
  CMDP_STATUS_INFEASIBLE = 4,
  CMDP_STATUS_TIMEOUT = 5,
  // The method cannot handle the reward family or problem size.
  CMDP_STATUS_UNSUPPORTED = 6,
  // Solver failure or caught panic.
  CMDP_STATUS_INTERNAL = 7,
} CmdpStatus;

// Loaded, validated problem instance.
typedef struct CmdpProblem CmdpProblem;

// Result of a solve.
typedef struct CmdpSolution CmdpSolution;

// Exact evaluation of a policy.
typedef struct CmdpEvaluation {
  double expected_return;
  // Largest constraint mass minus its bound (negative when all are slack).
  double max_violation;
  // 1 when every constraint holds within tolerance.
  int32_t feasible;
} CmdpEvaluation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none.
// The pointer stays valid until the next failing call on the thread.
const char *cmdp_last_error(void);

// Library version as a static NUL-terminated string.
const char *cmdp_version(void);

// Parses and validates a problem in the JSON problem-file format.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum CmdpStatus cmdp_problem_from_json(const char *json, struct CmdpProblem **out);

// Number of states (decision and terminal) in the problem.
//
// # Safety
// `problem` must be null or a live handle.
size_t cmdp_problem_num_states(const struct CmdpProblem *problem);

// # Safety
// `problem` must be null or a handle not yet freed.
void cmdp_problem_free(struct CmdpProblem *problem);

// Solves with `method` (`convex`, `extreme`, `envelope`, `greedy`,
// `naive-linear`). `timeout_seconds <= 0` means no limit.
//
// # Safety
// `problem` must be a live handle, `method` a NUL-terminated string and
// `out` writable.
enum CmdpStatus cmdp_solve(const struct CmdpProblem *problem,
                           const char *method,
                           double timeout_seconds,
                           struct CmdpSolution **out);

// Optimal value reported by the solver, NaN for a null handle.
//
// # Safety
// `solution` must be null or a live handle.
double cmdp_solution_objective(const struct CmdpSolution *solution);

// Method label, e.g. `extreme-pwl`. Owned by the solution.
//
// # Safety
// `solution` must be null or a live handle.
const char *cmdp_solution_method(const struct CmdpSolution *solution);

// Total vertex count for vertex-based methods, -1 otherwise.
//
// # Safety
// `solution` must be null or a live handle.
int64_t cmdp_solution_vertices(const struct CmdpSolution *solution);

// Writes the policy as JSON in the policy-file format to `*out`.
// Release with [`cmdp_string_free`].
//
// # Safety
// Handles must be live and belong together; `out` must be writable.
enum CmdpStatus cmdp_solution_policy_json(const struct CmdpProblem *problem,
                                          const struct CmdpSolution *solution,
                                          char **out);

// # Safety
// `solution` must be null or a handle not yet freed.
void cmdp_solution_free(struct CmdpSolution *solution);

// Evaluates a solution's policy exactly by forward recursion.
//
// # Safety
// Handles must be live and belong together; `out` must be writable.
enum CmdpStatus cmdp_evaluate_solution(const struct CmdpProblem *problem,
                                       const struct CmdpSolution *solution,
                                       struct CmdpEvaluation *out);

// Evaluates a policy given as JSON (policy file or solution file).
//
// # Safety
// `problem` must be live, `policy_json` NUL-terminated, `out` writable.
enum CmdpStatus cmdp_evaluate_policy_json(const struct CmdpProblem *problem,
                                          const char *policy_json,
                                          struct CmdpEvaluation *out);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void cmdp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMDP_FFI_H */
