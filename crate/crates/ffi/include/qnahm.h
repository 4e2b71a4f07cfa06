#ifndef QNAHM_H
#define QNAHM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first five agree with the command-line exit codes.
 */
typedef enum QnStatus {
  QN_STATUS_OK = 0,
  QN_STATUS_MISMATCH = 1,
  QN_STATUS_PARSE_ERROR = 2,
  QN_STATUS_INVALID_SPEC = 3,
  QN_STATUS_INSUFFICIENT = 4,
  QN_STATUS_NULL_POINTER = 5,
  QN_STATUS_INVALID_UTF8 = 6,
  QN_STATUS_PANIC = 7,
} QnStatus;

/**
 * The outcome of verifying one identity.
 */
typedef struct QnReport QnReport;

/**
 * A truncated series in `x` and fractional powers of `q`.
 */
typedef struct QnSeries QnSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qn_version(void);

/**
 * Message of the last failure on this thread. Valid until the next call
 * into the library from the same thread; never null.
 */
const char *qn_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void qn_string_free(char *s);

/**
 * Nahm sum `Σ q^{½nᵀAn + bᵀn + c} / Π (q)_{n_i}` below `q^order`.
 *
 * `a_num`/`a_den` hold the `k×k` matrix row by row, `b_num`/`b_den` hold
 * `k` entries. Any denominator array may be null, meaning all ones; `b_num`
 * may be null for `b = 0`. The matrix must be positive definite.
 *
 * # Safety
 * Non-null arrays must hold the stated number of elements; `out` must be
 * a valid pointer.
 */
enum QnStatus qn_nahm_sum(size_t k,
                          const int64_t *a_num,
                          const int64_t *a_den,
                          const int64_t *b_num,
                          const int64_t *b_den,
                          int64_t c_num,
                          int64_t c_den,
                          int64_t order,
                          struct QnSeries **out);

/**
 * One side (`side` 0 for the left, 1 for the right) of the single identity
 * in a `.qid` text, below `q^order`; `order <= 0` uses the file's order.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QnStatus qn_expand_spec(const char *text, int32_t side, int64_t order, struct QnSeries **out);

/**
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void qn_series_free(struct QnSeries *s);

/**
 * The series as JSON: `{"trunc": {"num", "den"}, "terms": [[x, e_num, e_den, c_num, c_den], ...]}`.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
char *qn_series_json(const struct QnSeries *s);

/**
 * Coefficient of `x^x_deg q^(exp_num/exp_den)` as `p` or `p/q`; null when
 * the exponent is at or beyond the truncation.
 *
 * # Safety
 * `s` must be a live handle or null.
 */
char *qn_series_coeff_str(const struct QnSeries *s,
                          int64_t x_deg,
                          int64_t exp_num,
                          int64_t exp_den);

/**
 * 1 when both series agree below the smaller truncation, 0 when they do
 * not, -1 if either handle is null.
 *
 * # Safety
 * Both arguments must be live handles or null.
 */
int32_t qn_series_equal(const struct QnSeries *a, const struct QnSeries *b);

/**
 * Verifies a builtin family. `params_json` is a JSON object such as
 * `{"k": 3, "lambda": "1/2", "which": "3"}` or null; `order <= 0` uses the
 * family default; `raw` keeps eta-style prefactors. On return `*out` holds
 * a report even when the identity does not match; the status is the
 * report's.
 *
 * # Safety
 * `family` must be a NUL-terminated string, `params_json` one or null, and
 * `out` a valid pointer.
 */
enum QnStatus qn_verify_builtin(const char *family,
                                const char *params_json,
                                int64_t order,
                                bool raw,
                                struct QnReport **out);

/**
 * # Safety
 * `r` must be a live handle or null.
 */
enum QnStatus qn_report_status(const struct QnReport *r);

/**
 * The report as JSON.
 *
 * # Safety
 * `r` must be a live handle or null.
 */
char *qn_report_json(const struct QnReport *r);

/**
 * # Safety
 * `r` must come from this library and must not be used afterwards.
 */
void qn_report_free(struct QnReport *r);

/**
 * Verifies every identity of a `.qid` text. `*json_out` receives a JSON
 * array of reports, or null when the text does not parse or bind; the
 * status is the worst over all identities.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `json_out` a valid pointer.
 */
enum QnStatus qn_verify_spec_json(const char *text, int64_t order, char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QNAHM_H */
