#ifndef CILAB_H
#define CILAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CilStatus {
  CIL_STATUS_OK = 0,
  CIL_STATUS_NULL_POINTER = 1,
  CIL_STATUS_INVALID_ARGUMENT = 2,
  CIL_STATUS_CONFIG = 3,
  CIL_STATUS_COMPUTATION = 4,
  CIL_STATUS_GATE_FAILURE = 5,
  CIL_STATUS_PANIC = 6,
} CilStatus;

/**
 * Result of one exact toy run.
 */
typedef struct CilToy CilToy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cil_version(void);

/**
 * Message of the last failing call on this thread, or null. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *cil_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void cil_string_free(char *s);

/**
 * Runs one `cil` subcommand without writing to stdout. `argv` excludes the program name.
 * Artifacts named in the arguments are written as on the command line. On success
 * `*manifest_json` receives the manifest and the status is `Ok` or `GateFailure`.
 *
 * # Safety
 * `argv` must point to `argc` valid NUL-terminated strings; `manifest_json` must be a
 * valid pointer.
 */
enum CilStatus cil_run(size_t argc, const char *const *argv, char **manifest_json);

/**
 * Maps a status to the process exit code the `cil` binary would use.
 */
int32_t cil_exit_code(enum CilStatus status);

/**
 * Exact toy scheme from zero with λ_k = 2^(k+shift). The ranges match `cil toy`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle for [`cil_toy_free`].
 */
enum CilStatus cil_toy_run(size_t steps, uint32_t shift, struct CilToy **out);

/**
 * Number of defects held, steps + 1.
 *
 * # Safety
 * `toy` must be null or a live handle.
 */
size_t cil_toy_len(const struct CilToy *toy);

/**
 * Defect after step `k` as a double.
 *
 * # Safety
 * `toy` must be a live handle and `value` a valid pointer.
 */
enum CilStatus cil_toy_defect(const struct CilToy *toy, size_t k, double *value);

/**
 * Defect after step `k` as an exact fraction "p/q"; free with [`cil_string_free`].
 *
 * # Safety
 * `toy` must be a live handle and `text` a valid pointer.
 */
enum CilStatus cil_toy_defect_exact(const struct CilToy *toy, size_t k, char **text);

/**
 * Whether every step obeys the one-step defect bound; 1 yes, 0 no, -1 null handle.
 *
 * # Safety
 * `toy` must be null or a live handle.
 */
int32_t cil_toy_lemma_holds(const struct CilToy *toy);

/**
 * # Safety
 * `toy` must be null or a handle from [`cil_toy_run`] not yet freed.
 */
void cil_toy_free(struct CilToy *toy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CILAB_H */
