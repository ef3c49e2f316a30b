#ifndef FQUAD_H
#define FQUAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The numeric values are stable.
 */
typedef enum FqStatus {
  FQ_STATUS_OK = 0,
  FQ_STATUS_NULL_POINTER = 1,
  FQ_STATUS_INVALID_UTF8 = 2,
  FQ_STATUS_PARSE = 3,
  FQ_STATUS_BOUND_EXCEEDED = 4,
  FQ_STATUS_INVALID = 5,
  FQ_STATUS_UNKNOWN_SUITE = 6,
  FQ_STATUS_VIOLATION = 7,
} FqStatus;

/**
 * A cospan between non-degenerate spaces.
 */
typedef struct FqCospan FqCospan;

/**
 * A quadratic space.
 */
typedef struct FqSpace FqSpace;

/**
 * A morphism of the span category.
 */
typedef struct FqSpan FqSpan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *fq_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fq_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void fq_string_free(char *s);

/**
 * Parses a space from an inline descriptor such as `H0+x1` or from the
 * text file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FqStatus fq_space_parse(const char *text, struct FqSpace **out);

/**
 * # Safety
 * `space` must be null or a handle from this library and not yet freed.
 */
void fq_space_free(struct FqSpace *space);

/**
 * Dimension of the space, or 0 for a null handle.
 *
 * # Safety
 * `space` must be null or a live handle.
 */
size_t fq_space_dim(const struct FqSpace *space);

/**
 * Writes the canonical class string, e.g. `H1+H0+x0`.
 *
 * # Safety
 * `space` must be a live handle and `out` a valid pointer.
 */
enum FqStatus fq_space_class(const struct FqSpace *space, char **out);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum FqStatus fq_space_isometric(const struct FqSpace *a, const struct FqSpace *b, bool *out);

/**
 * `|Hom(v, w)|`. A `bound` of 0 selects the default enumeration bound.
 *
 * # Safety
 * `v`, `w` must be live handles and `out` a valid pointer.
 */
enum FqStatus fq_count_homs(const struct FqSpace *v,
                            const struct FqSpace *w,
                            size_t bound,
                            size_t *out);

/**
 * `dim Hom(iso_v, iso_w)`. A `bound` of 0 selects the default bound.
 *
 * # Safety
 * `v`, `w` must be live handles and `out` a valid pointer.
 */
enum FqStatus fq_hom_iso_dim(const struct FqSpace *v,
                             const struct FqSpace *w,
                             size_t bound,
                             size_t *out);

/**
 * Parses a span in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FqStatus fq_span_parse(const char *text, struct FqSpan **out);

/**
 * # Safety
 * `span` must be null or a handle from this library and not yet freed.
 */
void fq_span_free(struct FqSpan *span);

/**
 * # Safety
 * `span` must be a live handle and `out` a valid pointer.
 */
enum FqStatus fq_span_format(const struct FqSpan *span, char **out);

/**
 * `second ∘ first`.
 *
 * # Safety
 * `first`, `second` must be live handles and `out` a valid pointer.
 */
enum FqStatus fq_span_compose(const struct FqSpan *first,
                              const struct FqSpan *second,
                              struct FqSpan **out);

/**
 * A cospan whose pullback span is `span`; both ends must be non-degenerate.
 *
 * # Safety
 * `span` must be a live handle and `out` a valid pointer.
 */
enum FqStatus fq_span_sigma_lift(const struct FqSpan *span, struct FqCospan **out);

/**
 * Parses a cospan in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FqStatus fq_cospan_parse(const char *text, struct FqCospan **out);

/**
 * # Safety
 * `cospan` must be null or a handle from this library and not yet freed.
 */
void fq_cospan_free(struct FqCospan *cospan);

/**
 * # Safety
 * `cospan` must be a live handle and `out` a valid pointer.
 */
enum FqStatus fq_cospan_format(const struct FqCospan *cospan, char **out);

/**
 * `second ∘ first`, through the pseudo push-out.
 *
 * # Safety
 * `first`, `second` must be live handles and `out` a valid pointer.
 */
enum FqStatus fq_cospan_compose(const struct FqCospan *first,
                                const struct FqCospan *second,
                                struct FqCospan **out);

/**
 * The pullback span `σ(cospan)`.
 *
 * # Safety
 * `cospan` must be a live handle and `out` a valid pointer.
 */
enum FqStatus fq_cospan_sigma(const struct FqCospan *cospan, struct FqSpan **out);

/**
 * Runs one verification suite. Returns `FQ_STATUS_VIOLATION` when a case
 * fails; `failures` (may be null) receives the number of failing cases.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `failures` null or valid.
 */
enum FqStatus fq_verify_suite(const char *name, uint64_t seed, size_t *failures);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FQUAD_H */
