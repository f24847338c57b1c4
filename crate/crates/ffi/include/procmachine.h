#ifndef PROCMACHINE_H
#define PROCMACHINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmError {
  PM_ERROR_OK = 0,
  PM_ERROR_NULL_ARGUMENT = 1,
  PM_ERROR_INVALID_UTF8 = 2,
  PM_ERROR_PARSE = 3,
  PM_ERROR_ENCODE = 4,
  PM_ERROR_COST = 5,
  PM_ERROR_OUT_OF_RANGE = 6,
  PM_ERROR_PANIC = 7,
} PmError;

typedef enum PmKind {
  PM_KIND_TM = 0,
  PM_KIND_ATM = 1,
  PM_KIND_RAM = 2,
  PM_KIND_PRAM = 3,
  PM_KIND_CIRCUIT = 4,
  PM_KIND_RTM = 5,
} PmKind;

typedef enum PmRunStatus {
  PM_RUN_STATUS_COMPLETED = 0,
  PM_RUN_STATUS_STEP_LIMIT = 1,
  PM_RUN_STATUS_RUNTIME_ERROR = 2,
} PmRunStatus;

typedef enum PmSpaceMode {
  PM_SPACE_MODE_OBSERVED = 0,
  PM_SPACE_MODE_EXACT = 1,
} PmSpaceMode;

// A parsed program.
typedef struct PmProgram PmProgram;

// A finished run, together with the program it ran.
typedef struct PmRun PmRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *pm_last_error_message(void);

// # Safety
// `s` is null or a string returned by this library, not yet freed.
void pm_string_free(char *s);

// # Safety
// `source` is a nul-terminated string; `out` points to writable storage.
enum PmError pm_program_parse(const char *source, struct PmProgram **out);

// # Safety
// `p` is null or a handle from this library, not yet freed.
void pm_program_free(struct PmProgram *p);

// Pretty-prints the program in the surface syntax.
//
// # Safety
// `p` is a live program handle; `out` points to writable storage.
enum PmError pm_program_to_source(const struct PmProgram *p, char **out);

// Compiles a machine description of the given kind into a program.
//
// # Safety
// `spec` is a nul-terminated string; `out` points to writable storage.
enum PmError pm_encode(enum PmKind kind, const char *spec, struct PmProgram **out);

// Runs a program to completion. `script` holds lines `channel <name>: <words>`
// and may be null for no input. `random` picks the seeded random
// scheduler instead of lowest-tag-first.
//
// # Safety
// `p` is a live program handle; `script` is null or nul-terminated; `out`
// points to writable storage.
enum PmError pm_run_new(const struct PmProgram *p,
                        const char *script,
                        bool random,
                        uint64_t seed,
                        size_t step_limit,
                        struct PmRun **out);

// # Safety
// `r` is null or a handle from this library, not yet freed.
void pm_run_free(struct PmRun *r);

// # Safety
// `r` is a live run handle; `out` points to writable storage.
enum PmError pm_run_status(const struct PmRun *r, enum PmRunStatus *out);

// Number of transitions taken.
//
// # Safety
// `r` is a live run handle; `out` points to writable storage.
enum PmError pm_run_steps(const struct PmRun *r, size_t *out);

// # Safety
// `r` is a live run handle; `out` points to writable storage.
enum PmError pm_run_output_count(const struct PmRun *r, size_t *out);

// Channel and word (as a bit string) of the `k`-th output, 0-based. Both
// strings are freed with [`pm_string_free`].
//
// # Safety
// `r` is a live run handle; `channel` and `word` point to writable storage.
enum PmError pm_run_output(const struct PmRun *r, size_t k, char **channel, char **word);

// The cost report of the run, one line per output, as printed by `procmachine report`.
//
// # Safety
// `r` is a live run handle; `out` points to writable storage.
enum PmError pm_run_report_text(const struct PmRun *r,
                                enum PmSpaceMode mode,
                                size_t exact_limit,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROCMACHINE_H */
