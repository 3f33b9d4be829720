#ifndef OPTOACOUSTIC_H
#define OPTOACOUSTIC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every `oa_*` call.
typedef enum OaStatus {
  OA_STATUS_OK = 0,
  OA_STATUS_NULL_POINTER = 1,
  OA_STATUS_INVALID_ARGUMENT = 2,
  OA_STATUS_NUMERICAL = 3,
  OA_STATUS_BUFFER_TOO_SMALL = 4,
  OA_STATUS_PANIC = 5,
} OaStatus;

// Entanglement series of a trajectory.
typedef enum OaSeries {
  OA_SERIES_TIME = 0,
  // Stokes–phonon log-negativity.
  OA_SERIES_EN_STOKES_PHONON = 1,
  // Stokes–anti-Stokes log-negativity.
  OA_SERIES_EN_STOKES_ANTI_STOKES = 2,
  // Anti-Stokes occupancy.
  OA_SERIES_ANTI_STOKES_OCCUPANCY = 3,
  // Phonon occupancy.
  OA_SERIES_PHONON_OCCUPANCY = 4,
} OaSeries;

// Opaque covariance matrix.
typedef struct OaCovMat OaCovMat;

// Opaque system parameters.
typedef struct OaParams OaParams;

// Opaque protocol trajectory.
typedef struct OaTrajectory OaTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *oa_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`) and returns the full length
// without the terminator. Empty after a successful call.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t oa_last_error_message(char *buf, size_t len);

// Parameters of the reference operating point.
//
// # Safety
// `out` must be a valid pointer.
enum OaStatus oa_params_new_default(struct OaParams **out);

// # Safety
// `params` must be null or a handle from this library, freed once.
void oa_params_free(struct OaParams *params);

// Sets a parameter by name. Rates are angular (rad/s); names are
// `gamma`, `Gamma`, `omega_ac`, `g`, `g_tilde`, `gamma_tilde`, `v_opt`,
// `v_ac`, `T_m`, `k`, `delta_a_tilde`. The value is checked before it is
// stored.
//
// # Safety
// `params` must be a live handle and `key` a NUL-terminated string.
enum OaStatus oa_params_set(struct OaParams *params, const char *key, double value);

// Reads a parameter by name (see [`oa_params_set`]).
//
// # Safety
// `params` must be a live handle, `key` a NUL-terminated string and
// `out` a valid pointer.
enum OaStatus oa_params_get(const struct OaParams *params, const char *key, double *out);

// Thermal phonon occupancy at the configured temperature.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum OaStatus oa_params_n_th(const struct OaParams *params, double *out);

// Predicted peak log-negativity `−ln[1 − 2(g/Γn)²]`; fails with
// `Numerical` when heating dominates.
//
// # Safety
// `out` must be a valid pointer.
enum OaStatus oa_en_max(double g, double gamma_ac, double n_th, double *out);

// Covariance of `n_modes` (2 or 3) modes from `4·n_modes²` row-major
// values; the input is symmetrized.
//
// # Safety
// `data` must point to `4·n_modes²` readable values; `out` must be valid.
enum OaStatus oa_covmat_new(size_t n_modes, const double *data, struct OaCovMat **out);

// # Safety
// `cov` must be null or a handle from this library, freed once.
void oa_covmat_free(struct OaCovMat *cov);

// Number of modes.
//
// # Safety
// `cov` must be a live handle and `out` a valid pointer.
enum OaStatus oa_covmat_modes(const struct OaCovMat *cov, size_t *out);

// Copies the matrix row-major into `buf`; `needed` (optional) receives
// the number of values.
//
// # Safety
// `cov` must be a live handle; `buf` null with `len = 0` or `len`
// writable values; `needed` null or valid.
enum OaStatus oa_covmat_data(const struct OaCovMat *cov, double *buf, size_t len, size_t *needed);

// Symplectic eigenvalues, ascending.
//
// # Safety
// As for [`oa_covmat_data`].
enum OaStatus oa_covmat_symplectic_spectrum(const struct OaCovMat *cov,
                                            double *buf,
                                            size_t len,
                                            size_t *needed);

// Log-negativity between modes `i` and `j`.
//
// # Safety
// `cov` must be a live handle and `out` a valid pointer.
enum OaStatus oa_covmat_log_negativity(const struct OaCovMat *cov, size_t i, size_t j, double *out);

// Closed-form write-phase covariance `(a, b)` at time `t` with the phonon
// starting at occupancy `n0`.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum OaStatus oa_covariance_entangle(const struct OaParams *params,
                                     double t,
                                     double n0,
                                     struct OaCovMat **out);

// Runs write (`tau1`), delay (`tau_d`) and readout (`tau2`) with
// `samples` points per phase, integrated to relative tolerance `rtol`.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum OaStatus oa_run_protocol(const struct OaParams *params,
                              double tau1,
                              double tau_d,
                              double tau2,
                              size_t samples,
                              double rtol,
                              struct OaTrajectory **out);

// # Safety
// `traj` must be null or a handle from this library, freed once.
void oa_trajectory_free(struct OaTrajectory *traj);

// Number of samples.
//
// # Safety
// `traj` must be a live handle and `out` a valid pointer.
enum OaStatus oa_trajectory_len(const struct OaTrajectory *traj, size_t *out);

// Copies one series (an [`OaSeries`] value) into `buf`.
//
// # Safety
// As for [`oa_covmat_data`], with `traj` a live handle.
enum OaStatus oa_trajectory_series(const struct OaTrajectory *traj,
                                   int32_t series,
                                   double *buf,
                                   size_t len,
                                   size_t *needed);

// Refined peak of the Stokes–phonon (`anti_stokes = false`) or
// Stokes–anti-Stokes log-negativity.
//
// # Safety
// `traj` must be a live handle; `value` and `time` valid pointers.
enum OaStatus oa_trajectory_peak(const struct OaTrajectory *traj,
                                 bool anti_stokes,
                                 double *value,
                                 double *time);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTOACOUSTIC_H */
