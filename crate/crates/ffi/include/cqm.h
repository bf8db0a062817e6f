#ifndef CQM_H
#define CQM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CqmStatus {
  CQM_STATUS_OK = 0,
  CQM_STATUS_NULL_POINTER = 1,
  CQM_STATUS_DIMENSION = 2,
  CQM_STATUS_INVALID_STATE = 3,
  CQM_STATUS_NOT_HERMITIAN = 4,
  CQM_STATUS_NOT_UNITARY = 5,
  CQM_STATUS_NOT_EQUIVALENT = 6,
  CQM_STATUS_PROPERTY_VIOLATED = 7,
  CQM_STATUS_INVALID_ARGUMENT = 8,
  CQM_STATUS_NUMERICAL = 9,
  CQM_STATUS_INFEASIBLE = 10,
  CQM_STATUS_NOT_TRACELESS = 11,
  CQM_STATUS_OUT_OF_RANGE = 12,
  CQM_STATUS_BUFFER_TOO_SMALL = 13,
  CQM_STATUS_PANIC = 14,
} CqmStatus;

typedef enum CqmRegime {
  CQM_REGIME_UNCONSTRAINED = 0,
  CQM_REGIME_ISOENERGETIC = 1,
} CqmRegime;

/**
 * Opaque composite system (H_R, H_S, U).
 */
typedef struct CqmCompositeSystem CqmCompositeSystem;

/**
 * Opaque validated density matrix.
 */
typedef struct CqmDensityMatrix CqmDensityMatrix;

/**
 * Flat exchange report. `optimal_rho_r0` is owned by the report and
 * released by [`cqm_exchange_report_release`].
 */
typedef struct CqmExchangeReport {
  enum CqmRegime regime;
  size_t n;
  double delta_i;
  double delta_s;
  /**
   * Meaningful only when `has_eta` is true.
   */
  double eta;
  bool has_eta;
  double purity_s0;
  double energy_s0;
  double energy_shift;
  struct CqmDensityMatrix *optimal_rho_r0;
} CqmExchangeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *cqm_last_error_message(void);

/**
 * Validates an `n x n` matrix as a density matrix.
 *
 * # Safety
 * `data` must point to `2 * n * n` doubles; `out` must be writable.
 */
enum CqmStatus cqm_density_matrix_new(const double *data, size_t n, struct CqmDensityMatrix **out);

/**
 * # Safety
 * `rho` must be null or a handle from this library not yet freed.
 */
void cqm_density_matrix_free(struct CqmDensityMatrix *rho);

/**
 * Dimension of the state, 0 for a null handle.
 *
 * # Safety
 * `rho` must be null or a live handle.
 */
size_t cqm_density_matrix_dim(const struct CqmDensityMatrix *rho);

/**
 * Entry (row, col).
 *
 * # Safety
 * `rho` must be a live handle; `re` and `im` must be writable.
 */
enum CqmStatus cqm_density_matrix_get(const struct CqmDensityMatrix *rho,
                                      size_t row,
                                      size_t col,
                                      double *re,
                                      double *im);

/**
 * Copies the matrix as interleaved row-major doubles into `buf`, which
 * must hold at least `2 * n * n` values.
 *
 * # Safety
 * `rho` must be a live handle; `buf` must have `len` writable doubles.
 */
enum CqmStatus cqm_density_matrix_copy(const struct CqmDensityMatrix *rho, double *buf, size_t len);

/**
 * tr ρ²
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_purity(const struct CqmDensityMatrix *rho, double *out);

/**
 * 1 − tr ρ²
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_linear_entropy(const struct CqmDensityMatrix *rho, double *out);

/**
 * −tr ρ ln ρ
 *
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum CqmStatus cqm_von_neumann_entropy(const struct CqmDensityMatrix *rho, double *out);

/**
 * Builds a composite system from H_R and U; H_S = U H_R U†. A null `h_r`
 * means H_R = 0 and a null `u` means U = 1.
 *
 * # Safety
 * Non-null matrix pointers must hold `2 * n * n` doubles; `out` must be
 * writable.
 */
enum CqmStatus cqm_composite_new(const double *h_r,
                                 const double *u,
                                 size_t n,
                                 struct CqmCompositeSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle from this library not yet freed.
 */
void cqm_composite_free(struct CqmCompositeSystem *sys);

/**
 * Part dimension N, 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t cqm_composite_dim(const struct CqmCompositeSystem *sys);

/**
 * Largest receiver information gain for the given sender state.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CqmStatus cqm_max_info(const struct CqmCompositeSystem *sys,
                            const struct CqmDensityMatrix *rho_s0,
                            enum CqmRegime regime,
                            double *out);

/**
 * Receiver state maximizing the information gain. The caller owns the
 * returned handle.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CqmStatus cqm_optimal_receiver_state(const struct CqmCompositeSystem *sys,
                                          const struct CqmDensityMatrix *rho_s0,
                                          enum CqmRegime regime,
                                          struct CqmDensityMatrix **out);

/**
 * Fills `out` with the exchange report for the regime. On success the
 * report owns a state handle; release it with
 * [`cqm_exchange_report_release`].
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CqmStatus cqm_exchange_report(const struct CqmCompositeSystem *sys,
                                   const struct CqmDensityMatrix *rho_s0,
                                   enum CqmRegime regime,
                                   struct CqmExchangeReport *out);

/**
 * Frees the state held by a report and nulls the pointer.
 *
 * # Safety
 * `report` must be null or a report filled by [`cqm_exchange_report`].
 */
void cqm_exchange_report_release(struct CqmExchangeReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CQM_H */
