/* Copyright 2026 the roughweyl authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef ROUGHWEYL_H
#define ROUGHWEYL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RwStatus {
  RW_STATUS_OK = 0,
  RW_STATUS_NULL_ARGUMENT = 1,
  RW_STATUS_DOMAIN = 2,
  RW_STATUS_PRECONDITION = 3,
  RW_STATUS_NUMERICAL = 4,
  RW_STATUS_RESOURCE = 5,
  RW_STATUS_CONFIG = 6,
  RW_STATUS_IO = 7,
  RW_STATUS_INTERNAL = 8,
  RW_STATUS_INVALID_UTF8 = 9,
  RW_STATUS_PANIC = 10,
} RwStatus;

/**
 * Which remainder rate to predict.
 */
typedef enum RwTheorem {
  RW_THEOREM_MAIN = 0,
  RW_THEOREM_MAIN2 = 1,
  RW_THEOREM_MAIN3 = 2,
} RwTheorem;

/**
 * Opaque discretized operator −ℏ²Δ + V.
 */
typedef struct RwOperator RwOperator;

/**
 * Opaque potential.
 */
typedef struct RwPotential RwPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message of this thread, excluding the
 * terminating NUL.
 */
size_t rw_last_error_length(void);

/**
 * Copy the last error message into `buf` (NUL-terminated, truncated to
 * `len − 1` bytes). Returns the number of bytes written excluding the NUL.
 */
size_t rw_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rw_version(void);

/**
 * Parse a potential spec from a TOML table.
 */
enum RwStatus rw_potential_from_toml(const char *text, struct RwPotential **out);

/**
 * Σ x_i² − λ on [−B, B]^d with sublevel margin ν.
 */
enum RwStatus rw_potential_harmonic(size_t dim,
                                    double lambda,
                                    double nu,
                                    double box_half_width,
                                    struct RwPotential **out);

void rw_potential_free(struct RwPotential *p);

size_t rw_potential_dim(const struct RwPotential *p);

/**
 * V(x) for a point of `dim` coordinates inside the evaluation box.
 */
enum RwStatus rw_potential_value(const struct RwPotential *p,
                                 const double *x,
                                 size_t dim,
                                 double *out);

/**
 * Weyl term ℏ^{−d} L^cl_{γ,d} ∫ V₋^{γ+d/2} over the evaluation box.
 */
enum RwStatus rw_weyl_term(const struct RwPotential *p,
                           double hbar,
                           double gamma,
                           size_t cells,
                           double *out);

/**
 * Discretize −ℏ²Δ + V on `points_per_axis`^d interior nodes of the box.
 */
enum RwStatus rw_operator_assemble(const struct RwPotential *p,
                                   size_t points_per_axis,
                                   double hbar,
                                   struct RwOperator **out);

void rw_operator_free(struct RwOperator *op);

size_t rw_operator_order(const struct RwOperator *op);

/**
 * Number of eigenvalues ≤ e, from the inertia of H − e.
 */
enum RwStatus rw_operator_count(const struct RwOperator *op, double e, size_t *out);

/**
 * Σ (λ_j)₋^γ for γ ∈ (0, 1], by the layer-cake formula.
 */
enum RwStatus rw_operator_riesz(const struct RwOperator *op, double gamma, double *out);

/**
 * Exact Tr g_γ(−ℏ²Δ + |x|² − λ) on ℝ^d.
 */
enum RwStatus rw_oscillator_trace(size_t d, double hbar, double lambda, double gamma, double *out);

/**
 * Weyl term of the same oscillator.
 */
enum RwStatus rw_oscillator_weyl(size_t d, double hbar, double lambda, double gamma, double *out);

/**
 * Predicted slope κ − d of log R against log ℏ. `exploratory` (optional)
 * is set to 1 when a precondition of the rate fails.
 */
enum RwStatus rw_predicted_exponent(double gamma,
                                    uint32_t k,
                                    double mu,
                                    size_t d,
                                    enum RwTheorem theorem,
                                    double *out,
                                    int32_t *exploratory);

/**
 * Run the sweep described by the TOML file at `path` and write its
 * reports. `passed` (optional) receives 1 when the rate verdict passes.
 */
enum RwStatus rw_sweep_run_file(const char *path, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROUGHWEYL_H */
