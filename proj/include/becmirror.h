/* becmirror: condensate side-mode <-> mechanical mirror state transfer
 * simulator. C API over the C++ core: plain structs in, opaque handles out,
 * integer status codes. Not thread-safe per handle; distinct handles may be
 * used concurrently. bm_last_error() returns a thread-local message for the
 * most recent failing call on the calling thread.
 */
#ifndef BECMIRROR_H
#define BECMIRROR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_INVALID_ARGUMENT = 1,
  BM_ERR_NOT_CONVERGED = 2,
  BM_ERR_BRACKET = 3,
  BM_ERR_SIZE_LIMIT = 4,
  BM_ERR_GRID = 5,
  BM_ERR_IO = 6,
  BM_ERR_DIVERGED = 7,
  BM_ERR_INTERNAL = 8
} bm_status;

const char* bm_version(void);
const char* bm_status_name(int status);
const char* bm_last_error(void);

/* ---- parameters ---- */

typedef struct bm_physical_params {
  double mirror_mass_kg;
  double mirror_omega_rad_s;
  double cavity_length_m;
  double kappa_rad_s;
  double detuning_c_rad_s;     /* omega_l - omega_c, sign-carrying */
  double pump_rate_rad_s;      /* |eta| */
  double wavelength_m;
  double atom_mass_kg;
  double atom_number;
  double detuning_a_rad_s;     /* omega_l - omega_a, sign-carrying */
  double coupling_g_rad_s;
  int detuning_is_effective;   /* nonzero: detuning_c is already the shifted
                                  cavity detuning */
} bm_physical_params;

typedef struct bm_derived_params {
  double k_laser_rad_m;
  double omega_cavity_rad_s;
  double xi_rad_s_m;
  double x_zp_m;
  double x_zp_wide_m;
  double xi_m_rad_s;
  double xi_2_rad_s;
  double omega_2_rad_s;
  double delta_tilde_rad_s;
  double n_cav;
  double phi_estimate_rad_s;
  double omega_m_shifted_rad_s;
  double omega_2_shifted_rad_s;
  double omega_st_rad_s;
  double d_chi;                /* raw noise strength; symmetrized is d_chi/2 */
  double t_transfer_s;         /* +inf when omega_st = 0 */
} bm_derived_params;

int bm_derive(const bm_physical_params* p, bm_derived_params* out);

typedef struct bm_steady_state {
  double a_re, a_im;
  double n_cav;
  double phi_rad_s;
  double mean_x_m, mean_x_2;
  int phase_shift_negligible;
  int iterations;
  double residual;
} bm_steady_state;

int bm_steady_state_solve(const bm_physical_params* p, int max_iterations,
                          int disable_backaction, bm_steady_state* out);

/* free_parameter: "g", "delta_a" or "omega_m". */
int bm_match_frequencies(const bm_physical_params* p, const char* free_parameter,
                         double bracket_lo, double bracket_hi,
                         bm_physical_params* out, double* residual);

/* ---- Gaussian channel (quadrature order x_2, p_2, x_m, p_m) ---- */

/* 4x4 matrices are row-major double[16]. */
int bm_propagator(double omega_st_rad_s, double t_s, double s_out[16]);
int bm_noise_covariance(double omega_st_rad_s, double xi_2_rad_s,
                        double xi_m_rad_s, double d_eff, double t_s,
                        double n_out[16]);
int bm_apply_channel_moments(const double mean[4], const double cov[16],
                             const double s[16], const double n[16],
                             double mean_out[4], double cov_out[16]);

/* ---- stochastic trajectories ---- */

typedef struct bm_sde_result bm_sde_result;

int bm_sde_run(double omega_st_rad_s, double xi_2_rad_s, double xi_m_rad_s,
               double d_eff, const double initial_mean[4], uint64_t seed,
               double dt_s, double t_end_s, long long n_paths, int n_threads,
               bm_sde_result** out);
int bm_sde_sample_count(const bm_sde_result* r, long long* count);
int bm_sde_ensemble_at(const bm_sde_result* r, long long sample, double* t_s,
                       double mean[4], double cov[16]);
int bm_sde_write_csv(const bm_sde_result* r, const char* path);
void bm_sde_free(bm_sde_result* r);

/* ---- Wigner grids ---- */

typedef struct bm_wigner_grid bm_wigner_grid;

typedef struct bm_grid_spec {
  double x_min, x_max;
  long long n_x;
  double p_min, p_max;
  long long n_p;
} bm_grid_spec;

/* kind: 0 vacuum, 1 coherent(alpha), 2 thermal(nbar in alpha), 3 cat(alpha) */
int bm_wigner_state(int kind, double alpha, const bm_grid_spec* spec,
                    bm_wigner_grid** out);
int bm_wigner_apply_channel(const bm_wigner_grid* in, double theta_rad,
                            const double n22[4], bm_wigner_grid** out);
int bm_wigner_overlap(const bm_wigner_grid* a, const bm_wigner_grid* b,
                      double* trace_overlap, double* normalized_overlap);
int bm_wigner_marginals(const bm_wigner_grid* g, double* px /* n_x */,
                        double* pp /* n_p */);
int bm_wigner_spec(const bm_wigner_grid* g, bm_grid_spec* spec);
int bm_wigner_values(const bm_wigner_grid* g, const double** values);
int bm_wigner_integral(const bm_wigner_grid* g, double* integral);
int bm_wigner_min(const bm_wigner_grid* g, double* min_value);
/* fringe warning and renormalization drift recorded on the output grid */
int bm_wigner_flags(const bm_wigner_grid* g, int* fringe_warning,
                    double* renorm_drift);
int bm_wigner_write_csv(const bm_wigner_grid* g, const char* path);
int bm_wigner_write_json(const bm_wigner_grid* g, const char* path);
int bm_wigner_read_csv(const char* path, bm_wigner_grid** out);
int bm_wigner_write_pgm(const bm_wigner_grid* g, const char* path);
int bm_wigner_write_ppm(const bm_wigner_grid* g, const char* path);
void bm_wigner_free(bm_wigner_grid* g);

/* ---- full pre-elimination model ---- */

typedef struct bm_timeseries bm_timeseries;

/* state order: re_a, im_a, x_2, p_2, x_m, p_m */
int bm_full_model_integrate(const bm_physical_params* p, const double s0[6],
                            double t_end_s, double tol, long long n_samples,
                            double velocity_damping, bm_timeseries** out);
int bm_timeseries_count(const bm_timeseries* ts, long long* count);
int bm_timeseries_row(const bm_timeseries* ts, long long row, double* t_s,
                      double state[6]);
int bm_timeseries_write_csv(const bm_timeseries* ts, const char* path);
void bm_timeseries_free(bm_timeseries* ts);

int bm_steady_full_state(const bm_physical_params* p, double state[6]);

/* eigenvalues sorted by imaginary part; stable: all real parts <= 1e-9 kappa */
int bm_linearized_spectrum(const bm_physical_params* p, double eig_re[6],
                           double eig_im[6], int* stable);

/* ---- oracle suite ---- */

/* options_json keys (all optional): dim, grid_points, span, alpha, paths,
 * seed, tolerance_scale. Returns a JSON report; free with bm_string_free. */
int bm_oracle_check(const char* options_json, char** report_json);
void bm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* BECMIRROR_H */
