#ifndef TORIC_MA_H
#define TORIC_MA_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ToricStatus {
  TORIC_STATUS_OK = 0,
  TORIC_STATUS_NULL_POINTER = 1,
  TORIC_STATUS_INVALID_ARGUMENT = 2,
  TORIC_STATUS_DIMENSION_MISMATCH = 3,
  TORIC_STATUS_NON_CONVEX = 4,
  TORIC_STATUS_MASS_MISMATCH = 5,
  TORIC_STATUS_NON_CONVERGENCE = 6,
  TORIC_STATUS_PANIC = 7,
} ToricStatus;

/**
 * A convex polytope.
 */
typedef struct ToricBody ToricBody;

/**
 * A piecewise-linear convex function with an asymptotic body.
 */
typedef struct ToricFunction ToricFunction;

/**
 * A finite measure of weighted atoms.
 */
typedef struct ToricMeasure ToricMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *toric_ma_last_error_message(void);

/**
 * Forgets the last error of this thread.
 */
void toric_ma_clear_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *toric_ma_version(void);

/**
 * Hull of `n_vertices` points given as rows of `dim` doubles.
 */
enum ToricStatus toric_ma_body_new(size_t dim,
                                   const double *coords,
                                   size_t n_vertices,
                                   struct ToricBody **out_body);

/**
 * Body from JSON `{"dim": n, "vertices": [[...], ...]}`.
 */
enum ToricStatus toric_ma_body_from_json(const char *json, struct ToricBody **out_body);

void toric_ma_body_free(struct ToricBody *body);

enum ToricStatus toric_ma_body_dim(const struct ToricBody *body, size_t *out_dim);

enum ToricStatus toric_ma_body_volume(const struct ToricBody *body, double *out_volume);

/**
 * Support function `h_P(x)` with `x` of length `dim`.
 */
enum ToricStatus toric_ma_body_support(const struct ToricBody *body,
                                       const double *x,
                                       size_t dim,
                                       double *out_value);

/**
 * `MV(P₁, …, Pₙ)` of `n` bodies of dimension `n`.
 */
enum ToricStatus toric_ma_mixed_volume(const struct ToricBody *const *list,
                                       size_t n,
                                       double *out_mv);

/**
 * `lhs = MV(P₁, …, Pₙ)`, `rhs = Π Vol(Pᵢ)^{1/n}`, `holds = lhs ≥ rhs − 1e-9`.
 */
enum ToricStatus toric_ma_bm_check(const struct ToricBody *const *list,
                                   size_t n,
                                   double *out_lhs,
                                   double *out_rhs,
                                   bool *out_holds);

/**
 * Convex function with values at `n_nodes` nodes; fails on nonconvex data.
 */
enum ToricStatus toric_ma_function_new(const struct ToricBody *body,
                                       const double *nodes,
                                       size_t n_nodes,
                                       const double *values,
                                       struct ToricFunction **out_fn);

/**
 * `h_P` sampled at the nodes.
 */
enum ToricStatus toric_ma_function_support(const struct ToricBody *body,
                                           const double *nodes,
                                           size_t n_nodes,
                                           struct ToricFunction **out_fn);

void toric_ma_function_free(struct ToricFunction *h);

enum ToricStatus toric_ma_function_len(const struct ToricFunction *h, size_t *out_len);

/**
 * Copies the node values into `values[0..len]`; `len` must equal the node count.
 */
enum ToricStatus toric_ma_function_values(const struct ToricFunction *h,
                                          double *values,
                                          size_t len);

enum ToricStatus toric_ma_function_eval(const struct ToricFunction *h,
                                        const double *x,
                                        size_t dim,
                                        double *out_value);

/**
 * Monge-Ampère masses per node into `masses[0..len]`, plus the interior total
 * and the mass of nodes on the boundary of the node hull.
 */
enum ToricStatus toric_ma_function_ma(const struct ToricFunction *h,
                                      double *masses,
                                      size_t len,
                                      double *out_total,
                                      double *out_boundary_remainder);

/**
 * Atoms at rows of `dim` doubles with the given masses.
 */
enum ToricStatus toric_ma_measure_new(size_t dim,
                                      const double *points,
                                      const double *masses,
                                      size_t n_atoms,
                                      struct ToricMeasure **out_measure);

void toric_ma_measure_free(struct ToricMeasure *mu);

/**
 * Solves `MA(h) = μ`, normalized by `sup(h − h_P) = 0`. A nonpositive
 * `box_radius` selects the default frame. The solution lists the atoms first.
 */
enum ToricStatus toric_ma_solve(const struct ToricBody *body,
                                const struct ToricMeasure *mu,
                                double box_radius,
                                double tol,
                                struct ToricFunction **out_solution,
                                double *out_residual);

/**
 * Solves `MA(h) = e^{λh}μ`.
 */
enum ToricStatus toric_ma_solve_aubin_yau(const struct ToricBody *body,
                                          const struct ToricMeasure *mu,
                                          double lambda,
                                          double box_radius,
                                          double tol,
                                          struct ToricFunction **out_solution,
                                          double *out_residual);

/**
 * Capacity of the region `{"boxes": [{"lo": [...], "hi": [...]}]}` computed on
 * `n_nodes` grid nodes. Both the mass and the energy formula are returned.
 */
enum ToricStatus toric_ma_capacity(const struct ToricBody *body,
                                   const char *region_json,
                                   const double *nodes,
                                   size_t n_nodes,
                                   double *out_cap_mass,
                                   double *out_cap_energy);

/**
 * Runs the command-line tool on `argc` arguments (without the program name).
 * `*out_stdout` and `*out_stderr` receive strings to release with
 * [`toric_ma_string_free`]; `*out_exit_code` the exit status.
 */
enum ToricStatus toric_ma_cli_run(const char *const *argv,
                                  size_t argc,
                                  int *out_exit_code,
                                  char **out_stdout,
                                  char **out_stderr);

/**
 * Releases a string returned by this library.
 */
void toric_ma_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORIC_MA_H */
