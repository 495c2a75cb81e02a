#ifndef LILY_ROUTER_H
#define LILY_ROUTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of every call.
 */
typedef enum LilyStatus {
  LILY_STATUS_OK = 0,
  LILY_STATUS_NULL_POINTER = 1,
  LILY_STATUS_INVALID_ARGUMENT = 2,
  LILY_STATUS_NUMERIC_FAILURE = 3,
  LILY_STATUS_BUFFER_TOO_SMALL = 4,
  LILY_STATUS_PANIC = 5,
} LilyStatus;

/**
 * Opaque computed-curve handle.
 */
typedef struct LilyCurve LilyCurve;

/**
 * Opaque scenario handle.
 */
typedef struct LilyScenario LilyScenario;

/**
 * Peak of a curve inside a time window.
 */
typedef struct LilyPeak {
  double t_peak;
  double f_peak;
  double sigma_eff;
  size_t n;
  /**
   * Non-zero when the curve is flat over the window.
   */
  uint8_t flat;
} LilyPeak;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lily_version(void);

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated
 * to `capacity`) into `buffer` and stores the untruncated length in `needed`.
 */
enum LilyStatus lily_last_error_message(char *buffer, size_t capacity, size_t *needed);

/**
 * Writes the 7x7 reduced Hamiltonian in row-major order into `re` and `im`
 * (49 doubles each).
 */
enum LilyStatus lily_reduced_hamiltonian(size_t n,
                                         double beta,
                                         double gamma,
                                         double delta,
                                         double *re,
                                         double *im);

/**
 * Bloch-averaged routing fidelity of the exact evolution at `(beta, gamma, delta)` and time `t`.
 */
enum LilyStatus lily_fidelity(size_t n,
                              double beta,
                              double gamma,
                              double delta,
                              double t,
                              double *out);

/**
 * Noiseless fidelity at the optimal parameters.
 */
enum LilyStatus lily_noiseless_fidelity(size_t n, double t, double *out);

/**
 * `R_QST = d (n^2 + n)`, `R_QR = d (n + 1) + 2`.
 */
enum LilyStatus lily_resource_counts(uint64_t n, uint64_t d, uint64_t *r_qst, uint64_t *r_qr);

/**
 * Noiseless scenario with default grid and numerics.
 */
enum LilyStatus lily_scenario_noiseless(size_t n, struct LilyScenario **out);

/**
 * Static von Mises phase noise with concentration `k`.
 */
enum LilyStatus lily_scenario_static_phase(size_t n, double k, struct LilyScenario **out);

/**
 * Static Gaussian weight noise with standard deviation `sigma`.
 */
enum LilyStatus lily_scenario_static_weight(size_t n, double sigma, struct LilyScenario **out);

/**
 * Ornstein-Uhlenbeck phase noise.
 */
enum LilyStatus lily_scenario_ou_phase(size_t n,
                                       double theta,
                                       double volatility,
                                       struct LilyScenario **out);

/**
 * Ornstein-Uhlenbeck weight noise.
 */
enum LilyStatus lily_scenario_ou_weight(size_t n,
                                        double theta,
                                        double volatility,
                                        struct LilyScenario **out);

/**
 * Replaces the time grid with `points` samples over `[t_min, t_max]`.
 * The scenario is left unchanged on error.
 */
enum LilyStatus lily_scenario_set_time_grid(struct LilyScenario *scenario,
                                            double t_min,
                                            double t_max,
                                            size_t points);

/**
 * Replaces the numeric settings. The scenario is left unchanged on error.
 */
enum LilyStatus lily_scenario_set_numerics(struct LilyScenario *scenario,
                                           size_t phase_grid,
                                           size_t hermite_nodes,
                                           double dt,
                                           size_t realizations,
                                           uint64_t master_seed);

/**
 * Releases a scenario. Null is ignored.
 */
void lily_scenario_free(struct LilyScenario *scenario);

/**
 * Computes the scenario's fidelity curve.
 */
enum LilyStatus lily_curve_compute(const struct LilyScenario *scenario, struct LilyCurve **out);

/**
 * Number of time points.
 */
enum LilyStatus lily_curve_len(const struct LilyCurve *curve, size_t *out);

/**
 * Copies the curve into caller buffers of length `capacity`. `stderr_out` may
 * be null; for deterministic models it is filled with NaN.
 */
enum LilyStatus lily_curve_copy(const struct LilyCurve *curve,
                                double *times,
                                double *mean_fidelity,
                                double *stderr_out,
                                size_t capacity);

/**
 * Peak inside `[t_lo, t_hi]` with quadratic refinement.
 */
enum LilyStatus lily_curve_peak(const struct LilyCurve *curve,
                                double t_lo,
                                double t_hi,
                                struct LilyPeak *out);

/**
 * Releases a curve. Null is ignored.
 */
void lily_curve_free(struct LilyCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LILY_ROUTER_H */
