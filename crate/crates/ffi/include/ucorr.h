#ifndef UCORR_H
#define UCORR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UcorrStatus {
  UCORR_STATUS_OK = 0,
  UCORR_STATUS_NULL_POINTER = 1,
  UCORR_STATUS_INVALID_ARGUMENT = 2,
  UCORR_STATUS_SHAPE = 3,
  UCORR_STATUS_NO_CONVERGENCE = 4,
  UCORR_STATUS_NOT_UNIT_VECTOR = 5,
  UCORR_STATUS_MAXIMALLY_ENTANGLED = 6,
  UCORR_STATUS_PANIC = 7,
} UcorrStatus;

/**
 * A dense complex matrix.
 */
typedef struct UcorrMatrix UcorrMatrix;

/**
 * An embezzlement protocol of fixed length.
 */
typedef struct UcorrProtocol UcorrProtocol;

/**
 * A unit vector in `C^n ⊗ C^m`.
 */
typedef struct UcorrTarget UcorrTarget;

typedef struct UcorrComplex {
  double re;
  double im;
} UcorrComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *ucorr_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ucorr_version(void);

/**
 * Target from `n·m` row-major amplitudes `α_ik` at index `i·m + k`. The
 * vector must have unit norm to within 1e-12.
 *
 * # Safety
 * `entries` must point to `n·m` values and `out` must be writable.
 */
enum UcorrStatus ucorr_target_new(const struct UcorrComplex *entries,
                                  size_t n,
                                  size_t m,
                                  struct UcorrTarget **out);

/**
 * `Σ_i e_i ⊗ e_i / √min(n, m)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum UcorrStatus ucorr_target_maximally_entangled(size_t n, size_t m, struct UcorrTarget **out);

/**
 * # Safety
 * `target` must come from a `ucorr_target_*` constructor, or be null.
 */
void ucorr_target_free(struct UcorrTarget *target);

/**
 * The rotation angle `θ` of the target.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_target_theta(const struct UcorrTarget *target, double *theta);

/**
 * `1 − cos(θ/r)^r`, resolved below machine epsilon.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_target_overlap_deficit(const struct UcorrTarget *target,
                                              uint64_t r,
                                              double *deficit);

/**
 * Protocol of length `r ≥ 1` embezzling `target`.
 *
 * # Safety
 * `target` must be valid and `out` writable.
 */
enum UcorrStatus ucorr_protocol_new(const struct UcorrTarget *target,
                                    size_t r,
                                    struct UcorrProtocol **out);

/**
 * # Safety
 * `protocol` must come from [`ucorr_protocol_new`], or be null.
 */
void ucorr_protocol_free(struct UcorrProtocol *protocol);

/**
 * `|⟨e_1 ⊗ ψ ⊗ e_1, (U ⊗ V)(α ⊗ ψ)⟩|`, the embezzlement fidelity.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_protocol_overlap(const struct UcorrProtocol *protocol, double *overlap);

/**
 * The `nm × nm` correlation matrix of the protocol, from the closed form.
 *
 * # Safety
 * `protocol` must be valid and `out` writable.
 */
enum UcorrStatus ucorr_protocol_correlation(const struct UcorrProtocol *protocol,
                                            struct UcorrMatrix **out);

/**
 * The `r → ∞` limit: `α` in the first column, zeros elsewhere.
 *
 * # Safety
 * `target` must be valid and `out` writable.
 */
enum UcorrStatus ucorr_limit_correlation(const struct UcorrTarget *target,
                                         struct UcorrMatrix **out);

/**
 * Matrix from `rows·cols` row-major entries.
 *
 * # Safety
 * `entries` must point to `rows·cols` values and `out` must be writable.
 */
enum UcorrStatus ucorr_matrix_new(const struct UcorrComplex *entries,
                                  size_t rows,
                                  size_t cols,
                                  struct UcorrMatrix **out);

/**
 * # Safety
 * `matrix` must come from a constructor in this library, or be null.
 */
void ucorr_matrix_free(struct UcorrMatrix *matrix);

/**
 * Writes the matrix dimensions.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_matrix_shape(const struct UcorrMatrix *matrix, size_t *rows, size_t *cols);

/**
 * Copies the entries row-major into `buffer`, which holds `len` values.
 * Fails with `Shape` if `len` is not exactly `rows·cols`.
 *
 * # Safety
 * `buffer` must be writable for `len` values.
 */
enum UcorrStatus ucorr_matrix_entries(const struct UcorrMatrix *matrix,
                                      struct UcorrComplex *buffer,
                                      size_t len);

/**
 * Largest singular value.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_operator_norm(const struct UcorrMatrix *matrix, double *norm);

/**
 * Bounds on the injective norm of an `nm × nm` matrix viewed in
 * `M_n ⊗ M_m`, from `restarts` seeded alternating maximizations.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_injective_norm(const struct UcorrMatrix *matrix,
                                      size_t n,
                                      size_t m,
                                      size_t restarts,
                                      uint64_t seed,
                                      double *lower,
                                      double *upper);

/**
 * Bounds on the projective norm of an `nm × nm` matrix.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_projective_norm(const struct UcorrMatrix *matrix,
                                       size_t n,
                                       size_t m,
                                       double *lower,
                                       double *upper);

/**
 * Local membership of a matrix supported on its first column. Writes
 * whether it is local and the projective norm of that column.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_loc_membership(const struct UcorrMatrix *matrix,
                                      size_t n,
                                      size_t m,
                                      bool *member,
                                      double *pi);

/**
 * Choi certificate for membership in the operator-norm ball. Writes the
 * smallest eigenvalue of the certificate and whether it is valid.
 *
 * # Safety
 * Pointers must be valid.
 */
enum UcorrStatus ucorr_qmax_certify(const struct UcorrMatrix *matrix,
                                    size_t n,
                                    size_t m,
                                    double *min_eig,
                                    bool *valid);

/**
 * Checks a box `p(a, b | x, y)` with `n` inputs and `m` outputs per side,
 * flat index `((a·m + b)·n + x)·n + y`. `condition` receives 0 when the
 * box is non-signalling, otherwise the number (1 to 4) of the first
 * failed condition: non-negativity, normalization, Bob's marginal,
 * Alice's marginal.
 *
 * # Safety
 * `probabilities` must point to `len` values; `condition` must be writable.
 */
enum UcorrStatus ucorr_nsb_check(size_t n,
                                 size_t m,
                                 const double *probabilities,
                                 size_t len,
                                 uint8_t *condition);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UCORR_H */
