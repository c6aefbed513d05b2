#ifndef H2D_H
#define H2D_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status code returned by every function.
 */
typedef enum H2dStatus {
  H2D_STATUS_OK = 0,
  H2D_STATUS_NULL_POINTER = 1,
  H2D_STATUS_INVALID_INPUT = 2,
  H2D_STATUS_ZERO_PARAMETER = 3,
  H2D_STATUS_DOMAIN_VIOLATION = 4,
  H2D_STATUS_ASYMMETRY = 5,
  H2D_STATUS_ILL_CONDITIONED = 6,
  H2D_STATUS_TRUNCATION_NOT_CONVERGED = 7,
  H2D_STATUS_QUADRATURE_UNDER_RESOLVED = 8,
  H2D_STATUS_NOT_SPD = 9,
  H2D_STATUS_NOT_PD = 10,
  H2D_STATUS_DIVERGENT_PRODUCT = 11,
  H2D_STATUS_CONFIG_ERROR = 12,
  H2D_STATUS_IO_ERROR = 13,
  H2D_STATUS_PANIC = 14,
} H2dStatus;

/**
 * Opaque square complex matrix.
 */
typedef struct H2dMatrix H2dMatrix;

/**
 * Opaque campaign report.
 */
typedef struct H2dReport H2dReport;

/**
 * Opaque series result.
 */
typedef struct H2dSeries H2dSeries;

typedef struct H2dComplex {
  double re;
  double im;
} H2dComplex;

/**
 * Stopping rule for the multilinear series.
 */
typedef struct H2dTruncationPolicy {
  uint32_t max_degree;
  double shell_tol;
  uint32_t quiet_shells;
} H2dTruncationPolicy;

/**
 * Closed form against its numerical counterpart.
 */
typedef struct H2dComparison {
  struct H2dComplex lhs;
  struct H2dComplex rhs;
  double abs_err;
} H2dComparison;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Writes at most `len`
 * bytes including the terminator and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t h2d_last_error_message(char *buf, size_t len);

/**
 * Physicists' Hermite polynomial H_n(x) at a complex argument.
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum H2dStatus h2d_hermite(uint32_t n, struct H2dComplex x, struct H2dComplex *result);

/**
 * Generalized Laguerre polynomial L_n^{(alpha)}(x), any integer alpha.
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum H2dStatus h2d_laguerre(uint32_t n,
                            int64_t alpha,
                            struct H2dComplex x,
                            struct H2dComplex *result);

/**
 * 2D Hermite polynomial H_{m,n}(z1, z2) by its finite sum.
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum H2dStatus h2d_h2d(uint32_t m,
                       uint32_t n,
                       struct H2dComplex z1,
                       struct H2dComplex z2,
                       struct H2dComplex *result);

/**
 * 2D Hermite polynomial through its Laguerre connection.
 *
 * # Safety
 * `result` must be null or valid for writes.
 */
enum H2dStatus h2d_h2d_laguerre(uint32_t m,
                                uint32_t n,
                                struct H2dComplex z1,
                                struct H2dComplex z2,
                                struct H2dComplex *result);

/**
 * Default stopping rule for the real series.
 */
struct H2dTruncationPolicy h2d_policy_real_default(void);

/**
 * Default stopping rule for the complex series.
 */
struct H2dTruncationPolicy h2d_policy_complex_default(void);

/**
 * New `dim` x `dim` matrix from row-major entries.
 *
 * # Safety
 * `entries` must hold `dim * dim` values; `matrix` must be valid for writes.
 */
enum H2dStatus h2d_matrix_new(size_t dim,
                              const struct H2dComplex *entries,
                              struct H2dMatrix **matrix);

/**
 * # Safety
 * `matrix` must be null or come from [`h2d_matrix_new`], freed once.
 */
void h2d_matrix_free(struct H2dMatrix *matrix);

/**
 * Real multilinear series for symmetric S (real entries) and X.
 * On `TruncationNotConverged` the partial result is still returned.
 *
 * # Safety
 * Pointers must be valid; `x` must hold as many entries as `s` has rows.
 */
enum H2dStatus h2d_series_real(const struct H2dMatrix *s,
                               const double *x,
                               struct H2dTruncationPolicy policy,
                               struct H2dSeries **series);

/**
 * det(I+S)^{-1/2} exp(X^T S (I+S)^{-1} X).
 *
 * # Safety
 * Pointers must be valid; `x` must hold as many entries as `s` has rows.
 */
enum H2dStatus h2d_kernel_real(const struct H2dMatrix *s, const double *x, double *result);

/**
 * Complex multilinear series for H and W.
 * On `TruncationNotConverged` the partial result is still returned.
 *
 * # Safety
 * Pointers must be valid; `w` must hold as many entries as `h` has rows.
 */
enum H2dStatus h2d_series_complex(const struct H2dMatrix *h,
                                  const struct H2dComplex *w,
                                  struct H2dTruncationPolicy policy,
                                  struct H2dSeries **series);

/**
 * det(I+H)^{-1} exp(W* H (I+H)^{-1} W).
 *
 * # Safety
 * Pointers must be valid; `w` must hold as many entries as `h` has rows.
 */
enum H2dStatus h2d_kernel_complex(const struct H2dMatrix *h,
                                  const struct H2dComplex *w,
                                  struct H2dComplex *result);

/**
 * # Safety
 * `series` must come from a series function; `result` valid for writes.
 */
enum H2dStatus h2d_series_value(const struct H2dSeries *series, struct H2dComplex *result);

/**
 * Degree reached and convergence flag.
 *
 * # Safety
 * `series` must come from a series function; out-pointers valid for writes.
 */
enum H2dStatus h2d_series_info(const struct H2dSeries *series,
                               uint32_t *degree_reached,
                               bool *converged);

/**
 * # Safety
 * `series` must be null or come from a series function, freed once.
 */
void h2d_series_free(struct H2dSeries *series);

/**
 * q-shifted factorial (a;q)_n; a negative `n` gives the infinite product.
 *
 * # Safety
 * `result` must be valid for writes.
 */
enum H2dStatus h2d_qpoch(struct H2dComplex a, double q, int64_t n, struct H2dComplex *result);

/**
 * Askey-Wilson integral by quadrature against its closed form.
 *
 * # Safety
 * `t` must hold 4 values; `result` must be valid for writes.
 */
enum H2dStatus h2d_askey_wilson(const struct H2dComplex *t,
                                double q,
                                size_t points,
                                struct H2dComparison *result);

/**
 * Runs a campaign. `config` is TOML text or null for the bundled
 * campaign; `seed` overrides the configured seed when `use_seed` is set;
 * `jobs` 0 means all cores. Timing fields are omitted.
 *
 * # Safety
 * `config` must be null or NUL-terminated; `report` valid for writes.
 */
enum H2dStatus h2d_campaign_run(const char *config,
                                bool use_seed,
                                uint64_t seed,
                                size_t jobs,
                                struct H2dReport **report);

/**
 * Exit code of the campaign: 0 when nothing failed, 1 otherwise.
 *
 * # Safety
 * `report` must come from [`h2d_campaign_run`].
 */
int32_t h2d_report_exit_code(const struct H2dReport *report);

/**
 * Check counts of the campaign.
 *
 * # Safety
 * `report` must come from [`h2d_campaign_run`]; out-pointers valid.
 */
enum H2dStatus h2d_report_counts(const struct H2dReport *report,
                                 size_t *total,
                                 size_t *pass,
                                 size_t *fail);

/**
 * JSON report into `buf` (NUL-terminated, truncated to `len`); returns
 * the full length, so a null `buf` queries the size.
 *
 * # Safety
 * `report` must come from [`h2d_campaign_run`]; `buf` null or valid for `len` bytes.
 */
size_t h2d_report_json(const struct H2dReport *report, char *buf, size_t len);

/**
 * # Safety
 * `report` must be null or come from [`h2d_campaign_run`], freed once.
 */
void h2d_report_free(struct H2dReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* H2D_H */
