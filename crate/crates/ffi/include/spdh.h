#ifndef SPDH_H
#define SPDH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum SpdhStatus {
  SPDH_STATUS_OK = 0,
  // A solver ran but did not find an answer.
  SPDH_STATUS_FAIL = 1,
  SPDH_STATUS_INVALID_INPUT = 2,
  SPDH_STATUS_NULL_POINTER = 3,
  // The output buffer is shorter than the element width.
  SPDH_STATUS_BUFFER_TOO_SMALL = 4,
  SPDH_STATUS_PANIC = 5,
} SpdhStatus;

// GADLP solver selector for [`spdh_solve_sdlp`].
typedef enum SpdhGadlp {
  SPDH_GADLP_BRUTE = 0,
  SPDH_GADLP_BSGS = 1,
  SPDH_GADLP_HIDDEN_SHIFT = 2,
} SpdhGadlp;

// A base pair with its orbit profile.
typedef struct SpdhContext SpdhContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a context from platform file text and an optional hex base element.
//
// # Safety
// `platform_text` must be a NUL-terminated string; `g_hex` may be null or NUL-terminated;
// `out` must be writable. Release the result with [`spdh_context_free`].
enum SpdhStatus spdh_context_new(const char *platform_text,
                                 const char *g_hex,
                                 struct SpdhContext **out);

// # Safety
// `ctx` must come from [`spdh_context_new`] and not be used afterwards. Null is ignored.
void spdh_context_free(struct SpdhContext *ctx);

// Byte length of every encoded element on the context's platform.
//
// # Safety
// `ctx` must be a live context and `out` writable.
enum SpdhStatus spdh_element_width(const struct SpdhContext *ctx, size_t *out);

// Orbit profile of the base pair; `out_bound` receives `N = n + r - 1`.
//
// # Safety
// `ctx` must be a live context; each output must be writable.
enum SpdhStatus spdh_profile(const struct SpdhContext *ctx,
                             uint64_t *out_n,
                             uint64_t *out_r,
                             uint64_t *out_bound);

// Writes `s(g, φ, x)` for `x ≥ 1`.
//
// # Safety
// `ctx` must be a live context and `out` valid for `out_len` bytes.
enum SpdhStatus spdh_s_eval(const struct SpdhContext *ctx,
                            uint64_t x,
                            uint8_t *out,
                            size_t out_len);

// Draws a secret from `1..=N` with a seeded generator and writes the public value.
//
// # Safety
// `ctx` must be a live context, `out_secret` writable, `out_public` valid for `out_len` bytes.
enum SpdhStatus spdh_keygen(const struct SpdhContext *ctx,
                            uint64_t seed,
                            uint64_t *out_secret,
                            uint8_t *out_public,
                            size_t out_len);

// Shared key `secret ∗ peer`.
//
// # Safety
// `ctx` must be a live context, `peer` valid for `peer_len` bytes, `out` for `out_len` bytes.
enum SpdhStatus spdh_derive(const struct SpdhContext *ctx,
                            uint64_t secret,
                            const uint8_t *peer,
                            size_t peer_len,
                            uint8_t *out,
                            size_t out_len);

// Recovers `x` with `s(g, φ, x) = target`, profiling by cycle detection. `gadlp` is a
// [`SpdhGadlp`] value.
//
// # Safety
// `ctx` must be a live context, `target` valid for `target_len` bytes, `out_x` writable.
enum SpdhStatus spdh_solve_sdlp(const struct SpdhContext *ctx,
                                const uint8_t *target,
                                size_t target_len,
                                uint32_t gadlp,
                                uint64_t *out_x);

// Copies the calling thread's last error message, NUL-terminated, into `buf`.
//
// `*out_len` receives the full message length excluding the terminator. If `buf` is null
// or too short, nothing is copied and `BufferTooSmall` is returned.
//
// # Safety
// `buf` must be null or valid for `buf_len` bytes; `out_len` must be null or writable.
enum SpdhStatus spdh_last_error_message(char *buf, size_t buf_len, size_t *out_len);

// Library version as a static NUL-terminated string.
const char *spdh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPDH_H */
