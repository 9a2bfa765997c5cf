#ifndef ALBANESE_H
#define ALBANESE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum AlbaneseStatus {
  ALBANESE_STATUS_OK = 0,
  ALBANESE_STATUS_INVALID_INPUT = 2,
  ALBANESE_STATUS_COMPUTATION_FAILED = 3,
  ALBANESE_STATUS_PRECISION_EXHAUSTED = 4,
  ALBANESE_STATUS_NULL_POINTER = 10,
  ALBANESE_STATUS_INVALID_UTF8 = 11,
  ALBANESE_STATUS_PANIC = 12,
} AlbaneseStatus;

// Opaque curve model with its basepoint.
typedef struct AlbaneseCurve AlbaneseCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses `y^2 = f(x)` from a JSON list of coefficients, constant term first.
// `genus <= 0` infers the genus from the degree. The basepoint starts as `"rational"`.
//
// # Safety
// `coeffs_json` must be a NUL-terminated string and `out` a valid pointer.
enum AlbaneseStatus albanese_curve_new(const char *coeffs_json,
                                       int32_t genus,
                                       struct AlbaneseCurve **out);

// Sets the basepoint: `"rational"`, `"tangential"`, `"x=X"` or `"x=X,y=Y"` with rational `X`, `Y`.
//
// # Safety
// `curve` must come from [`albanese_curve_new`]; `spec` must be NUL-terminated.
enum AlbaneseStatus albanese_curve_set_basepoint(struct AlbaneseCurve *curve, const char *spec);

// Genus of the curve, or `-1` for a null handle.
//
// # Safety
// `curve` must be null or come from [`albanese_curve_new`].
int32_t albanese_curve_genus(const struct AlbaneseCurve *curve);

// Releases a curve handle; null is ignored.
//
// # Safety
// `curve` must be null or come from [`albanese_curve_new`], and not be used afterwards.
void albanese_curve_free(struct AlbaneseCurve *curve);

// Logarithmic extension to `level` as JSON (same document as `albanese extend`).
//
// # Safety
// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
enum AlbaneseStatus albanese_extend_json(const struct AlbaneseCurve *curve,
                                         uint32_t level,
                                         char **out);

// F^0 generators to `level` as JSON (same document as `albanese hodge`).
//
// # Safety
// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
enum AlbaneseStatus albanese_hodge_json(const struct AlbaneseCurve *curve,
                                        uint32_t level,
                                        char **out);

// Period map to `level` as JSON (same document as `albanese periodmap`).
//
// # Safety
// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
enum AlbaneseStatus albanese_periodmap_json(const struct AlbaneseCurve *curve,
                                            uint32_t level,
                                            char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must be null or a string from this library, and not be used afterwards.
void albanese_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until the next call.
const char *albanese_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALBANESE_H */
