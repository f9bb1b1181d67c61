#ifndef PHILAP_H
#define PHILAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PhilapConclusion {
  PHILAP_CONCLUSION_NONE = 0,
  /**
   * Constant, equal to one of the square roots of the zeros of `psi`.
   */
  PHILAP_CONCLUSION_CONSTANT = 1,
  PHILAP_CONCLUSION_ANY_CONSTANT = 2,
  PHILAP_CONCLUSION_NO_POSITIVE_BOUNDED_SOLUTION = 3,
} PhilapConclusion;

typedef enum PhilapCondition {
  PHILAP_CONDITION_NONE = 0,
  PHILAP_CONDITION_PHI1 = 1,
  PHILAP_CONDITION_PHI2 = 2,
  PHILAP_CONDITION_PSI2 = 3,
} PhilapCondition;

typedef enum PhilapStatus {
  PHILAP_STATUS_OK = 0,
  PHILAP_STATUS_NULL_POINTER = 1,
  PHILAP_STATUS_INVALID_SPEC = 2,
  PHILAP_STATUS_UNSUPPORTED = 3,
  PHILAP_STATUS_PRECONDITION = 4,
  PHILAP_STATUS_NUMERIC = 5,
  PHILAP_STATUS_PANIC = 6,
} PhilapStatus;

typedef enum PhilapVerdictKind {
  PHILAP_VERDICT_KIND_NOT_APPLICABLE = 0,
  PHILAP_VERDICT_KIND_ESTIMATE_HOLDS = 1,
  PHILAP_VERDICT_KIND_LIOUVILLE = 2,
} PhilapVerdictKind;

/**
 * Opaque operator function `phi`.
 */
typedef struct PhilapPhi PhilapPhi;

/**
 * Opaque reaction coefficient `psi`.
 */
typedef struct PhilapPsi PhilapPsi;

/**
 * Infinite values are IEEE infinities; `theta_big` is NaN when the reaction
 * condition was not reached.
 */
typedef struct PhilapVerdict {
  enum PhilapVerdictKind kind;
  enum PhilapCondition failed;
  enum PhilapConclusion conclusion;
  bool boundary;
  double margin;
  double l;
  double d;
  double gamma;
  double big_gamma;
  double theta_big;
} PhilapVerdict;

typedef struct PhilapSweepRow {
  double radius;
  double c_hat;
  double harnack_log;
  bool positive_ok;
  double residual_max;
} PhilapSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length, or 0 when there
 * is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t philap_last_error(char *buf, size_t len);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_phi_constant_one(struct PhilapPhi **out);

/**
 * `phi(t) = t^{p/2-1}`, the p-Laplacian.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_phi_power_law(double p, struct PhilapPhi **out);

/**
 * `phi(t) = sum w_i t^{p_i/2-1}` over `len` terms.
 *
 * # Safety
 * `weights` and `exponents` must be valid for `len` reads, `out` for a
 * pointer write.
 */
enum PhilapStatus philap_phi_sum_of_powers(const double *weights,
                                           const double *exponents,
                                           size_t len,
                                           struct PhilapPhi **out);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_phi_exponential(struct PhilapPhi **out);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_phi_mean_curvature(struct PhilapPhi **out);

/**
 * # Safety
 * `phi` must be null or a handle from this library not yet freed.
 */
void philap_phi_free(struct PhilapPhi *phi);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_psi_zero(struct PhilapPsi **out);

/**
 * `psi(u^2) u = a u^q`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_psi_power(double a, double q, struct PhilapPsi **out);

/**
 * `psi(u^2) u = u^m - u^k` with `m < k`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_psi_double_power(double m, double k, struct PhilapPsi **out);

/**
 * `psi(u^2) u = a u^q (log u)^m` with `m = m_num/m_den` (both odd) and
 * `a m < 0`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_psi_log_power(double a,
                                       double q,
                                       int64_t m_num,
                                       int64_t m_den,
                                       struct PhilapPsi **out);

/**
 * `psi(t) = A t^p + B t^q + C t log t + D`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum PhilapStatus philap_psi_general_sum(double a,
                                         double p,
                                         double b,
                                         double q,
                                         double c,
                                         double d,
                                         struct PhilapPsi **out);

/**
 * # Safety
 * `psi` must be null or a handle from this library not yet freed.
 */
void philap_psi_free(struct PhilapPsi *psi);

/**
 * Classifies the equation `div(phi(|grad u|^2) grad u) + psi(u^2) u = 0` in
 * dimension `n`. With `liouville` set, nonnegative Ricci curvature and
 * bounded solutions are assumed and the conclusion is filled in.
 *
 * # Safety
 * `phi` and `psi` must be live handles, `out` valid for a write.
 */
enum PhilapStatus philap_classify(const struct PhilapPhi *phi,
                                  const struct PhilapPsi *psi,
                                  uint32_t n,
                                  bool liouville,
                                  struct PhilapVerdict *out);

/**
 * Critical dimensions `N1 >= N2` for extreme exponents `p_min <= p_max`;
 * infinite when the exponents coincide.
 *
 * # Safety
 * `n1` and `n2` must be valid for writes.
 */
enum PhilapStatus philap_critical_dimensions(double p_min, double p_max, double *n1, double *n2);

/**
 * Radial solutions with `u(0) = u0` on the model space of dimension `n` and
 * curvature `-k`, one per radius, each integrated over `[0, 2R]` with step
 * about `h`. Writes `len` rows.
 *
 * # Safety
 * `phi` and `psi` must be live handles; `radii` valid for `len` reads and
 * `rows` for `len` writes.
 */
enum PhilapStatus philap_radial_sweep(const struct PhilapPhi *phi,
                                      const struct PhilapPsi *psi,
                                      uint32_t n,
                                      double k,
                                      double u0,
                                      const double *radii,
                                      size_t len,
                                      double h,
                                      struct PhilapSweepRow *rows);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHILAP_H */
