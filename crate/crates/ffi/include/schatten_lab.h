#ifndef SCHATTEN_LAB_H
#define SCHATTEN_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Inner-product convention for `sl_assemble_tg`.
 */
#define SL_MODE_COEFFICIENT 0

#define SL_MODE_INTEGRAL 1

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_PARAMETER = 2,
  SL_STATUS_NUMERICAL = 3,
  SL_STATUS_IO = 4,
  SL_STATUS_UTF8 = 5,
  SL_STATUS_BUFFER_TOO_SMALL = 6,
  SL_STATUS_PANIC = 7,
} SlStatus;

typedef struct SlMatrix SlMatrix;

typedef struct SlSpectrum SlSpectrum;

typedef struct SlSymbol SlSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *sl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * g(z) = z^j, j ≥ 1.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SlStatus sl_symbol_monomial(size_t j, struct SlSymbol **out);

/**
 * g(z) = (1 − a z)^{−γ} with a = a_re + i a_im, |a| < 1.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SlStatus sl_symbol_kernel_power(double a_re, double a_im, double gamma, struct SlSymbol **out);

/**
 * Symbol from its compact text form, e.g. `"monomial:3"` or `"kernelpow:0.9,1"`.
 *
 * # Safety
 * `spec` must be NUL-terminated; `out` as for `sl_symbol_monomial`.
 */
enum SlStatus sl_symbol_parse(const char *spec, struct SlSymbol **out);

/**
 * Symbol from a JSON document.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` as for `sl_symbol_monomial`.
 */
enum SlStatus sl_symbol_from_json(const char *json, struct SlSymbol **out);

/**
 * # Safety
 * `s` must be NULL or a handle from an `sl_symbol_*` constructor, freed at most once.
 */
void sl_symbol_free(struct SlSymbol *s);

/**
 * Matrix of T_g on D_α truncated to indices 0..=n.
 * `mode` is `SL_MODE_COEFFICIENT` or `SL_MODE_INTEGRAL`.
 *
 * # Safety
 * `g` must be a live symbol handle; `out` as for `sl_symbol_monomial`.
 */
enum SlStatus sl_assemble_tg(const struct SlSymbol *g,
                             double alpha,
                             size_t n,
                             uint32_t mode,
                             struct SlMatrix **out);

/**
 * Side length of the stored block (n + 1).
 *
 * # Safety
 * `m` must be NULL or a live matrix handle.
 */
size_t sl_matrix_dim(const struct SlMatrix *m);

/**
 * Bound on the squared Frobenius norm of the part outside the block.
 *
 * # Safety
 * `m` must be a live matrix handle and `out` writable.
 */
enum SlStatus sl_matrix_tail_certificate(const struct SlMatrix *m, double *out);

/**
 * # Safety
 * `m` must be NULL or a handle from `sl_assemble_tg`, freed at most once.
 */
void sl_matrix_free(struct SlMatrix *m);

/**
 * Singular values of the assembled block, nonincreasing.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` as for `sl_symbol_monomial`.
 */
enum SlStatus sl_singular_values(const struct SlMatrix *m, struct SlSpectrum **out);

/**
 * Closed-form spectrum of T_{z^j} on D_α (coefficient norm), indices j..=n.
 *
 * # Safety
 * `out` as for `sl_symbol_monomial`.
 */
enum SlStatus sl_monomial_closed_form(size_t j, double alpha, size_t n, struct SlSpectrum **out);

/**
 * # Safety
 * `s` must be NULL or a live spectrum handle.
 */
size_t sl_spectrum_len(const struct SlSpectrum *s);

/**
 * Copies the singular values into `buf`. `*written` receives the spectrum length
 * even when `cap` is too small (then `SL_STATUS_BUFFER_TOO_SMALL` is returned).
 *
 * # Safety
 * `buf` must have room for `cap` doubles (may be NULL when `cap` is 0); `written` may be NULL.
 */
enum SlStatus sl_spectrum_values(const struct SlSpectrum *s,
                                 double *buf,
                                 size_t cap,
                                 size_t *written);

/**
 * Schatten p-norm of the spectrum: the truncated value, an upper bound from the
 * tail model, and the best estimate of the untruncated norm. Any output may be NULL.
 *
 * # Safety
 * `s` must be a live spectrum handle; non-NULL outputs must be writable.
 */
enum SlStatus sl_schatten_norm(const struct SlSpectrum *s,
                               double p,
                               double *value,
                               double *upper,
                               double *estimate);

/**
 * # Safety
 * `s` must be NULL or a spectrum handle, freed at most once.
 */
void sl_spectrum_free(struct SlSpectrum *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHATTEN_LAB_H */
