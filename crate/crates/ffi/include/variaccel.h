#ifndef VARIACCEL_H
#define VARIACCEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VaStatus {
  VA_STATUS_OK = 0,
  VA_STATUS_DOMAIN = 1,
  VA_STATUS_POLE = 2,
  VA_STATUS_CONSISTENCY = 3,
  VA_STATUS_NOT_CONVERGED = 4,
  VA_STATUS_IO = 5,
  VA_STATUS_PARSE = 6,
  VA_STATUS_NULL_POINTER = 7,
  VA_STATUS_PANIC = 8,
} VaStatus;

/**
 * Precision policy handle.
 */
typedef struct VaContext VaContext;

/**
 * A real or complex result.
 */
typedef struct VaNumber VaNumber;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Valid until the next
 * call on the same thread; do not free.
 */
const char *va_last_error(void);

/**
 * Creates a context with `target_digits` requested and `guard_digits` extra
 * working digits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum VaStatus va_context_new(uint32_t target_digits, uint32_t guard_digits, struct VaContext **out);

/**
 * # Safety
 * `ctx` must come from [`va_context_new`] and not be freed twice.
 */
void va_context_free(struct VaContext *ctx);

/**
 * Accelerated zeta partial sum of order `order` at `s = s_re + i s_im`.
 * `lambda = 0` gives the alternating series.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_zeta_accel(const struct VaContext *ctx,
                            const char *s_re,
                            const char *s_im,
                            const char *lambda,
                            size_t order,
                            struct VaNumber **out);

/**
 * Certified `zeta(s)` for `Re(s) > 0`, `s != 1`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_zeta_reference(const struct VaContext *ctx,
                                const char *s_re,
                                const char *s_im,
                                struct VaNumber **out);

/**
 * Accelerated pi partial sum of order `order`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_pi_accel(const struct VaContext *ctx,
                          const char *lambda,
                          size_t order,
                          struct VaNumber **out);

/**
 * Accelerated Catalan partial sum of order `order`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_catalan_accel(const struct VaContext *ctx,
                               const char *lambda,
                               size_t order,
                               struct VaNumber **out);

/**
 * Accelerated generalized Hurwitz partial sum of
 * `sum_{n>=0} 1/(n^u + xi)^s`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_hurwitz_accel(const struct VaContext *ctx,
                               const char *s,
                               const char *u,
                               const char *xi,
                               const char *lambda,
                               size_t order,
                               struct VaNumber **out);

/**
 * Stationary point of the order-`order` zeta partial sum at real `s`,
 * searched in `(lo, hi)`. `*found` is false when there is none; `*out`
 * then holds the grid point of smallest derivative.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VaStatus va_find_stationary_zeta(const struct VaContext *ctx,
                                      const char *s,
                                      size_t order,
                                      const char *lo,
                                      const char *hi,
                                      bool *found,
                                      struct VaNumber **out);

/**
 * Real part rounded to double; NaN for a null handle.
 *
 * # Safety
 * `n` must be null or a live handle.
 */
double va_number_re(const struct VaNumber *n);

/**
 * Imaginary part rounded to double; NaN for a null handle.
 *
 * # Safety
 * `n` must be null or a live handle.
 */
double va_number_im(const struct VaNumber *n);

/**
 * Decimal form with `digits` significant digits (`0` for all). Free with
 * [`va_string_free`]. Null for a null handle.
 *
 * # Safety
 * `n` must be null or a live handle.
 */
char *va_number_to_string(const struct VaNumber *n, size_t digits);

/**
 * # Safety
 * `s` must come from [`va_number_to_string`] and not be freed twice.
 */
void va_string_free(char *s);

/**
 * # Safety
 * `n` must come from this library and not be freed twice.
 */
void va_number_free(struct VaNumber *n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VARIACCEL_H */
