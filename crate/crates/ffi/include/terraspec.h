#ifndef TERRASPEC_H
#define TERRASPEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameter, dimension, index or grid.
   */
  TS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * `lambda` outside the domain of the requested quantity.
   */
  TS_STATUS_DOMAIN = 3,
  /**
   * A numeric procedure could not reach a decision.
   */
  TS_STATUS_NUMERIC = 4,
  TS_STATUS_PANIC = 5,
} TsStatus;

typedef enum TsFamily {
  /**
   * `param / n`
   */
  TS_FAMILY_CESARO_SCALED = 0,
  /**
   * `n^{-param}`
   */
  TS_FAMILY_P_CESARO = 1,
  /**
   * `1 / ln(n + 1)`; `param` is ignored.
   */
  TS_FAMILY_LOG_RECIPROCAL = 2,
  /**
   * `n^{-param}` used as a weight
   */
  TS_FAMILY_POWER_WEIGHT = 3,
  /**
   * `param^n`
   */
  TS_FAMILY_GEOMETRIC = 4,
  TS_FAMILY_CONSTANT = 5,
} TsFamily;

typedef enum TsTriState {
  TS_TRI_STATE_YES = 0,
  TS_TRI_STATE_NO = 1,
  TS_TRI_STATE_INCONCLUSIVE = 2,
} TsTriState;

typedef enum TsSpectralLabel {
  TS_SPECTRAL_LABEL_RESOLVENT = 0,
  TS_SPECTRAL_LABEL_POINT = 1,
  TS_SPECTRAL_LABEL_RESIDUAL = 2,
  TS_SPECTRAL_LABEL_CONTINUOUS_CANDIDATE = 3,
  TS_SPECTRAL_LABEL_BOUNDARY_UNKNOWN = 4,
} TsSpectralLabel;

typedef enum TsBandVerdict {
  TS_BAND_VERDICT_BOUNDED_BAND = 0,
  TS_BAND_VERDICT_DRIFTING = 1,
  TS_BAND_VERDICT_DEGENERATE = 2,
} TsBandVerdict;

/**
 * Opaque finite-section handle.
 */
typedef struct TsSection TsSection;

/**
 * Opaque sequence handle.
 */
typedef struct TsSequence TsSequence;

typedef struct TsBoundedness {
  enum TsTriState bounded;
  enum TsTriState compact;
  /**
   * `NaN` unless `bounded` is `Yes`.
   */
  double norm;
  double sup_estimate;
} TsBoundedness;

typedef struct TsResolventCheck {
  double max_residual;
  double d_lambda;
  bool passed;
  bool verification_claimed;
} TsResolventCheck;

typedef struct TsBand {
  double log_log_slope;
  double band_lo;
  double band_hi;
  double exponent;
  enum TsBandVerdict verdict;
} TsBand;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *ts_last_error_message(void);

/**
 * Kebab-case code of the last error on this thread, or null.
 */
const char *ts_last_error_code(void);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum TsStatus ts_sequence_new(enum TsFamily family, double param, struct TsSequence **out);

/**
 * Finite sequence `values[0..len]`, indexed from 1.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be valid for a pointer write.
 */
enum TsStatus ts_sequence_table(const double *values, uintptr_t len, struct TsSequence **out);

/**
 * # Safety
 * `seq` must be null or a handle from `ts_sequence_new`/`ts_sequence_table` not yet freed.
 */
void ts_sequence_free(struct TsSequence *seq);

/**
 * # Safety
 * `seq` must be a live handle and `out` valid for a write.
 */
enum TsStatus ts_sequence_eval(const struct TsSequence *seq, uintptr_t n, double *out);

/**
 * # Safety
 * `a`, `r`, `s` must be live handles and `out` valid for a write.
 */
enum TsStatus ts_classify_boundedness(const struct TsSequence *a,
                                      const struct TsSequence *r,
                                      const struct TsSequence *s,
                                      struct TsBoundedness *out);

/**
 * # Safety
 * `a`, `s` must be live handles and `out` valid for a write.
 */
enum TsStatus ts_classify_point(double re,
                                double im,
                                const struct TsSequence *a,
                                const struct TsSequence *s,
                                double chi,
                                enum TsSpectralLabel *out);

/**
 * `n x n` section of `(R_a - lambda I)^{-1}`.
 *
 * # Safety
 * `a` must be a live handle and `out` valid for a pointer write.
 */
enum TsStatus ts_resolvent_section(double re,
                                   double im,
                                   const struct TsSequence *a,
                                   uintptr_t n,
                                   struct TsSection **out);

/**
 * # Safety
 * `sec` must be a live handle.
 */
uintptr_t ts_section_dim(const struct TsSection *sec);

/**
 * Entry `(i, k)`, 0-based.
 *
 * # Safety
 * `sec` must be a live handle; `out_re`, `out_im` valid for writes.
 */
enum TsStatus ts_section_entry(const struct TsSection *sec,
                               uintptr_t i,
                               uintptr_t k,
                               double *out_re,
                               double *out_im);

/**
 * # Safety
 * `sec` must be null or a handle from `ts_resolvent_section` not yet freed.
 */
void ts_section_free(struct TsSection *sec);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for a write.
 */
enum TsStatus ts_verify_resolvent(double re,
                                  double im,
                                  const struct TsSequence *a,
                                  uintptr_t n,
                                  double tol,
                                  struct TsResolventCheck *out);

/**
 * # Safety
 * `a` must be a live handle and `out` valid for a write.
 */
enum TsStatus ts_ratio_band(const struct TsSequence *a,
                            double re,
                            double im,
                            double chi,
                            uintptr_t n_lo,
                            uintptr_t n_hi,
                            struct TsBand *out);

/**
 * Quasi-norm of finitely supported s-numbers `values[0..len]` (non-increasing).
 *
 * # Safety
 * `values` must point to `len` readable doubles, `a`, `r` must be live
 * handles, `out_value` valid for a write, and `out_argmax` null or valid.
 */
enum TsStatus ts_quasi_norm(const double *values,
                            uintptr_t len,
                            const struct TsSequence *a,
                            const struct TsSequence *r,
                            double *out_value,
                            uintptr_t *out_argmax);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TERRASPEC_H */
