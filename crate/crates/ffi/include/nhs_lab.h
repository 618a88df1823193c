#ifndef NHS_LAB_H
#define NHS_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every exported function.
 */
typedef enum NhsStatus {
  NHS_STATUS_OK = 0,
  NHS_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameter values, lengths or indices.
   */
  NHS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The points, distances or weights do not form a valid space.
   */
  NHS_STATUS_INVALID_SPACE = 3,
  /**
   * Malformed JSON or an invalid experiment configuration.
   */
  NHS_STATUS_CONFIG = 4,
  /**
   * The function or symbol is constant where a nonzero norm is needed.
   */
  NHS_STATUS_ZERO_NORM = 5,
  NHS_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  NHS_STATUS_INTERNAL = 7,
} NhsStatus;

/**
 * A finished experiment report and its JSON rendering.
 */
typedef struct NhsReport NhsReport;

/**
 * A weighted finite metric space with its dominating function and ball
 * family.
 */
typedef struct NhsSpace NhsSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *nhs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nhs_version(void);

/**
 * Build a space from `n` points of dimension `dim` stored row-major in
 * `coords` (Euclidean distance) and `n` positive weights. λ is fitted as
 * `C₀ r^{1/2}`.
 *
 * # Safety
 * `coords` must hold `n * dim` values and `weights` `n` values; `out` must
 * be writable.
 */
enum NhsStatus nhs_space_from_points(const double *coords,
                                     size_t n,
                                     size_t dim,
                                     const double *weights,
                                     struct NhsSpace **out);

/**
 * Build a space from an `n × n` row-major distance matrix.
 *
 * # Safety
 * `distances` must hold `n * n` values and `weights` `n` values; `out`
 * must be writable.
 */
enum NhsStatus nhs_space_from_distances(const double *distances,
                                        size_t n,
                                        const double *weights,
                                        struct NhsSpace **out);

/**
 * Build a space from the JSON space-file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NhsStatus nhs_space_from_json(const char *json, struct NhsSpace **out);

/**
 * Release a space. Null is ignored.
 *
 * # Safety
 * `space` must come from one of the constructors and not be freed twice.
 */
void nhs_space_free(struct NhsSpace *space);

/**
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_space_len(const struct NhsSpace *space, size_t *out);

/**
 * Refit λ as `C₀ r^κ` with the given exponent.
 *
 * # Safety
 * `space` must be a live handle.
 */
enum NhsStatus nhs_space_fit_lambda(struct NhsSpace *space, double kappa);

/**
 * λ(x, r) of the current dominating function.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_space_lambda(const struct NhsSpace *space, size_t x, double r, double *out);

/**
 * Greedy upper estimate of the geometric doubling constant N₀.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_geometric_doubling(const struct NhsSpace *space, size_t *out);

/**
 * K̃^{(τ)} for the nested pair B(inner_center, inner_radius) ⊂
 * B(outer_center, outer_radius).
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_coefficient(const struct NhsSpace *space,
                               size_t inner_center,
                               double inner_radius,
                               size_t outer_center,
                               double outer_radius,
                               double tau,
                               double *out);

/**
 * Campanato norm with ψ ≡ 1 of the function given by `len` point values.
 *
 * # Safety
 * `values` must hold `len` numbers; `space` must be live, `out` writable.
 */
enum NhsStatus nhs_campanato_norm(const struct NhsSpace *space,
                                  const double *values,
                                  size_t len,
                                  double tau,
                                  double gamma,
                                  double *out);

/**
 * M_{p,τ} f at every point, written to `out[0..len]`.
 *
 * # Safety
 * `values` and `out` must each hold `len` numbers; `space` must be live.
 */
enum NhsStatus nhs_maximal_p_tau(const struct NhsSpace *space,
                                 const double *values,
                                 size_t len,
                                 double p,
                                 double tau,
                                 double *out);

/**
 * Fractional Marcinkiewicz integral with the canonical kernel at every
 * point, written to `out[0..len]`.
 *
 * # Safety
 * `values` and `out` must each hold `len` numbers; `space` must be live.
 */
enum NhsStatus nhs_marcinkiewicz(const struct NhsSpace *space,
                                 const double *values,
                                 size_t len,
                                 double l,
                                 double rho,
                                 double s,
                                 double *out);

/**
 * Run an experiment configuration given as JSON.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum NhsStatus nhs_run_experiment(const char *config_json, struct NhsReport **out);

/**
 * The report as JSON; valid until the report is freed.
 *
 * # Safety
 * `report` must be a live handle.
 */
const char *nhs_report_json(const struct NhsReport *report);

/**
 * 0 when every exact check passed, 1 otherwise.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_report_exit_code(const struct NhsReport *report, int32_t *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum NhsStatus nhs_report_row_count(const struct NhsReport *report, size_t *out);

/**
 * Release a report. Null is ignored.
 *
 * # Safety
 * `report` must come from [`nhs_run_experiment`] and not be freed twice.
 */
void nhs_report_free(struct NhsReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NHS_LAB_H */
