#ifndef EXPRIESZ_H
#define EXPRIESZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ExprieszClass {
  EXPRIESZ_CLASS_FRAME = 0,
  EXPRIESZ_CLASS_RIESZ_SEQUENCE = 1,
  EXPRIESZ_CLASS_RIESZ_BASIS = 2,
  EXPRIESZ_CLASS_NEITHER = 3,
} ExprieszClass;

typedef enum ExprieszStatus {
  EXPRIESZ_STATUS_OK = 0,
  EXPRIESZ_STATUS_NULL_POINTER = 1,
  EXPRIESZ_STATUS_INVALID_INPUT = 2,
  EXPRIESZ_STATUS_PARSE = 3,
  EXPRIESZ_STATUS_HYPOTHESIS = 4,
  EXPRIESZ_STATUS_NUMERICAL = 5,
  EXPRIESZ_STATUS_BUFFER_TOO_SMALL = 6,
  EXPRIESZ_STATUS_INTERNAL = 7,
} ExprieszStatus;

typedef enum ExprieszVerdict {
  EXPRIESZ_VERDICT_RIESZ_STABLE = 0,
  EXPRIESZ_VERDICT_DEGENERATING = 1,
  EXPRIESZ_VERDICT_INCONCLUSIVE = 2,
} ExprieszVerdict;

typedef struct ExprieszDomain ExprieszDomain;

typedef struct ExprieszScan ExprieszScan;

typedef struct ExprieszSpectrum ExprieszSpectrum;

typedef struct ExprieszWkl {
  double sigma_min;
  double sigma_max;
  uintptr_t rank;
  double certificate;
  enum ExprieszClass system_class;
} ExprieszWkl;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *expriesz_version(void);

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *expriesz_last_error(void);

// Parses `{"intervals": [["a", "b"], ...]}` with rational endpoints.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum ExprieszStatus expriesz_domain_from_json(const char *json, struct ExprieszDomain **out);

// # Safety
// `d` must come from [`expriesz_domain_from_json`] and `out` be valid.
enum ExprieszStatus expriesz_domain_measure(const struct ExprieszDomain *d, double *out);

// # Safety
// `d` must be null or come from [`expriesz_domain_from_json`].
void expriesz_domain_free(struct ExprieszDomain *d);

// Parses a spectrum description such as
// `{"cosets": {"period": "4", "offsets": ["0", "1"]}}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum ExprieszStatus expriesz_spectrum_from_json(const char *json, struct ExprieszSpectrum **out);

// Writes the points in `[-t, t]` to `buf`. `len` receives the count; when
// it exceeds `cap` nothing is written and `BufferTooSmall` is returned.
//
// # Safety
// `s` must be a live handle, `buf` valid for `cap` writes, `len` valid.
enum ExprieszStatus expriesz_spectrum_window(const struct ExprieszSpectrum *s,
                                             double t,
                                             double *buf,
                                             uintptr_t cap,
                                             uintptr_t *len);

// # Safety
// `s` must be null or come from [`expriesz_spectrum_from_json`].
void expriesz_spectrum_free(struct ExprieszSpectrum *s);

// Gram scan over the window half-widths in `schedule` with default thresholds.
//
// # Safety
// Handles must be live, `schedule` valid for `len` reads, `out` valid.
enum ExprieszStatus expriesz_riesz_scan(const struct ExprieszSpectrum *s,
                                        const struct ExprieszDomain *d,
                                        const double *schedule,
                                        uintptr_t len,
                                        struct ExprieszScan **out);

// # Safety
// `scan` must be a live handle.
uintptr_t expriesz_scan_len(const struct ExprieszScan *scan);

// # Safety
// `scan` must be a live handle and `out` valid.
enum ExprieszStatus expriesz_scan_verdict(const struct ExprieszScan *scan,
                                          enum ExprieszVerdict *out);

// Row `i` of the scan: window half-width, point count and extreme eigenvalues.
//
// # Safety
// `scan` must be a live handle; the out pointers must be valid.
enum ExprieszStatus expriesz_scan_row(const struct ExprieszScan *scan,
                                      uintptr_t i,
                                      double *window_t,
                                      uintptr_t *num_points,
                                      double *lambda_min,
                                      double *lambda_max);

// # Safety
// `scan` must be null or come from [`expriesz_riesz_scan`].
void expriesz_scan_free(struct ExprieszScan *scan);

// Singular values of the coset/cell matrix for period `n_num/n_den`,
// offsets `off_num[k]/off_den[k]` and integer columns.
//
// # Safety
// Arrays must be valid for the given lengths and `out` valid.
enum ExprieszStatus expriesz_wkl_analyze(int64_t n_num,
                                         int64_t n_den,
                                         const int64_t *off_num,
                                         const int64_t *off_den,
                                         uintptr_t k,
                                         const int64_t *columns,
                                         uintptr_t l,
                                         double base_bound,
                                         struct ExprieszWkl *out);

// Smallest `|det|` over the square minors of the `p x p` Fourier matrix.
//
// # Safety
// `out` must be valid.
enum ExprieszStatus expriesz_chebotarev_min(uint64_t p, bool allow_composite, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPRIESZ_H */
