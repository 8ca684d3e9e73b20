#ifndef HYPERPINN_H
#define HYPERPINN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Codes 2 to 4 match the CLI exit codes.
 */
typedef enum HpStatus {
  HP_OK = 0,
  /**
   * A required pointer was null, a string was not UTF-8, or a buffer was too small.
   */
  HP_ERR_ARGUMENT = 1,
  HP_ERR_CONFIG = 2,
  HP_ERR_DATA = 3,
  HP_ERR_NUMERICAL = 4,
  HP_ERR_PANIC = 5,
} HpStatus;

/**
 * Problem a model was trained for.
 */
typedef enum HpProblem {
  HP_BURGERS = 0,
  HP_LORENZ = 1,
} HpProblem;

/**
 * Opaque model handle.
 */
typedef struct HpModel HpModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread (empty after success).
 * The pointer stays valid until the next call into this library on the thread.
 */
const char *hp_last_error(void);

/**
 * Loads an `.hpnn` file. `*out` receives a handle to release with `hp_model_free`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HpStatus hp_model_load(const char *path, struct HpModel **out);

/**
 * Creates a freshly initialized model, e.g. `("burgers", "hyperpinn", 0)`.
 *
 * # Safety
 * `problem` and `model` must be NUL-terminated strings and `out` a valid pointer.
 */
enum HpStatus hp_model_init(const char *problem,
                            const char *model,
                            uint64_t seed,
                            struct HpModel **out);

/**
 * Writes the model to an `.hpnn` file.
 *
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum HpStatus hp_model_save(const struct HpModel *model, const char *path);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void hp_model_free(struct HpModel *model);

/**
 * Problem the model was trained for.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum HpStatus hp_model_problem(const struct HpModel *model, enum HpProblem *out);

/**
 * Parameter counts: the network evaluated per query point and the trainable
 * total (the hypernetwork for a HyperPINN). Either pointer may be null.
 *
 * # Safety
 * `model` must be a live handle; non-null outputs must be valid pointers.
 */
enum HpStatus hp_model_param_counts(const struct HpModel *model,
                                    size_t *evaluated,
                                    size_t *trainable);

/**
 * Generated main-network parameters for the encoded parameterization
 * `lambda[0..lambda_len]`. `*written` receives the parameter count; the call
 * fails with `HP_ERR_ARGUMENT` if `out_len` is smaller. Only HyperPINN models.
 *
 * # Safety
 * Buffers must hold the stated number of values; `written` must be valid.
 */
enum HpStatus hp_generate_main(const struct HpModel *model,
                               const double *lambda,
                               size_t lambda_len,
                               double *out,
                               size_t out_len,
                               size_t *written);

/**
 * Burgers prediction `u(t[i], x[i])` at viscosity `nu` for `i < n`.
 *
 * # Safety
 * `t`, `x` and `out` must each hold `n` values.
 */
enum HpStatus hp_burgers_predict(const struct HpModel *model,
                                 double nu,
                                 const double *t,
                                 const double *x,
                                 size_t n,
                                 double *out);

/**
 * Learned Lorenz time derivative at `n` states stored as `x, y, z` triples.
 *
 * # Safety
 * `states` and `out` must each hold `3·n` values.
 */
enum HpStatus hp_lorenz_rhs(const struct HpModel *model,
                            double sigma,
                            double beta,
                            double rho,
                            const double *states,
                            size_t n,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERPINN_H */
