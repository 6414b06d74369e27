#ifndef WYSI_H
#define WYSI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  WYSI_STATUS_OK = 0,
  WYSI_STATUS_NULL_POINTER = 1,
  WYSI_STATUS_INVALID_ARGUMENT = 2,
  WYSI_STATUS_DIMENSION_MISMATCH = 3,
  WYSI_STATUS_NOT_HERMITIAN = 4,
  WYSI_STATUS_NOT_POSITIVE = 5,
  WYSI_STATUS_INVALID_TRACE = 6,
  WYSI_STATUS_SINGULAR = 7,
  WYSI_STATUS_NOT_UNITARY = 8,
  WYSI_STATUS_CROSS_CHECK = 9,
  WYSI_STATUS_NO_CONVERGENCE = 10,
  WYSI_STATUS_PANIC = 11,
} WysiStatus;

/**
 * Density matrix handle.
 */
typedef struct WysiDensity WysiDensity;

/**
 * Unitary family handle.
 */
typedef struct WysiFamily WysiFamily;

/**
 * Hermitian observable handle.
 */
typedef struct WysiObservable WysiObservable;

/**
 * Bound report handle.
 */
typedef struct WysiReport WysiReport;

/**
 * One grid point of a bound report.
 */
typedef struct {
  double phi;
  double lhs;
  double rhs;
  double margin;
  double wysi;
  double cos_hellinger;
  double fd_error;
  bool violated;
} WysiBoundPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *wysi_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wysi_version(void);

/**
 * Density matrix from `2 * dim * dim` interleaved doubles; validated for
 * Hermiticity, unit trace and positivity.
 *
 * # Safety
 * `re_im` must point to `2 * dim * dim` readable doubles and `out` must be writable.
 */
WysiStatus wysi_density_new(size_t dim, const double *re_im, WysiDensity **out);

/**
 * Qubit state `(I + r . sigma) / 2`.
 *
 * # Safety
 * `out` must be writable.
 */
WysiStatus wysi_density_from_bloch(double x, double y, double z, WysiDensity **out);

/**
 * Seeded Ginibre state of the given rank.
 *
 * # Safety
 * `out` must be writable.
 */
WysiStatus wysi_density_random(size_t dim, size_t rank, uint64_t seed, WysiDensity **out);

/**
 * # Safety
 * `rho` must be NULL or a live handle from this library; it is invalid afterwards.
 */
void wysi_density_free(WysiDensity *rho);

/**
 * Dimension of a state, or 0 for NULL.
 *
 * # Safety
 * `rho` must be NULL or a live handle.
 */
size_t wysi_density_dim(const WysiDensity *rho);

/**
 * Hermitian observable from `2 * dim * dim` interleaved doubles.
 *
 * # Safety
 * `re_im` must point to `2 * dim * dim` readable doubles and `out` must be writable.
 */
WysiStatus wysi_observable_new(size_t dim, const double *re_im, WysiObservable **out);

/**
 * Seeded `scale (G + G^dag) / 2` with complex Gaussian `G`.
 *
 * # Safety
 * `out` must be writable.
 */
WysiStatus wysi_observable_random(size_t dim, uint64_t seed, double scale, WysiObservable **out);

/**
 * # Safety
 * `k` must be NULL or a live handle from this library; it is invalid afterwards.
 */
void wysi_observable_free(WysiObservable *k);

/**
 * `phi -> exp(-i phi K / hbar)`.
 *
 * # Safety
 * `k` must be a live handle and `out` writable.
 */
WysiStatus wysi_family_exp(const WysiObservable *k, double hbar, WysiFamily **out);

/**
 * Qubit family with `K = varpi (alpha I + n . sigma)` for a fixed unit axis `n`.
 *
 * # Safety
 * `out` must be writable.
 */
WysiStatus wysi_family_axis(double nx,
                            double ny,
                            double nz,
                            double varpi,
                            double alpha,
                            double hbar,
                            WysiFamily **out);

/**
 * # Safety
 * `family` must be NULL or a live handle from this library; it is invalid afterwards.
 */
void wysi_family_free(WysiFamily *family);

/**
 * Wigner-Yanase skew information `-(1/2) Tr([sqrt(rho), K]^2)`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_skew_information(const WysiDensity *rho, const WysiObservable *k, double *out);

/**
 * Wigner-Yanase-Dyson skew information with exponent `p` in `(0, 1)`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_skew_information_dyson(const WysiDensity *rho,
                                       const WysiObservable *k,
                                       double p,
                                       double *out);

/**
 * `Tr(rho K^2) - Tr(rho K)^2`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_variance(const WysiDensity *rho, const WysiObservable *k, double *out);

/**
 * Affinity `Tr(sqrt(rho) sqrt(sigma))`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_affinity(const WysiDensity *rho, const WysiDensity *sigma, double *out);

/**
 * Hellinger angle `arccos Tr(sqrt(rho) sqrt(sigma))`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_hellinger_angle(const WysiDensity *rho, const WysiDensity *sigma, double *out);

/**
 * Evaluates the speed bound on `steps` uniform points of `[phi_min, phi_max]`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
WysiStatus wysi_bound_check(const WysiDensity *rho0,
                            const WysiFamily *family,
                            double hbar,
                            double phi_min,
                            double phi_max,
                            size_t steps,
                            WysiReport **out);

/**
 * Closed-form qubit example about the z axis, cross-checked numerically.
 *
 * # Safety
 * `out` must be writable.
 */
WysiStatus wysi_worked_example(double r0,
                               double azimuth,
                               double varpi,
                               double alpha,
                               double hbar,
                               double phi_min,
                               double phi_max,
                               size_t steps,
                               WysiReport **out);

/**
 * Number of grid points, or 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t wysi_report_len(const WysiReport *report);

/**
 * Number of violated grid points, or 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t wysi_report_violations(const WysiReport *report);

/**
 * Smallest margin over the grid.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
WysiStatus wysi_report_min_margin(const WysiReport *report, double *out);

/**
 * Copies grid point `index` into `out`.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
WysiStatus wysi_report_point(const WysiReport *report, size_t index, WysiBoundPoint *out);

/**
 * # Safety
 * `report` must be NULL or a live handle from this library; it is invalid afterwards.
 */
void wysi_report_free(WysiReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WYSI_H */
