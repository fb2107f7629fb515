/* C interface to the gyralab core: step distributions, walk/percolation
 * evolutions, lace-expansion series, and asymptotic fits.  All functions
 * return a status code (GL_OK on success); gl_last_error() describes the
 * most recent failure on the calling thread.  Objects are opaque handles
 * released with the matching *_free call. */
#ifndef GYRALAB_H
#define GYRALAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define GL_OK 0
#define GL_EINVAL 2
#define GL_EBUDGET 3
#define GL_ECOST 4
#define GL_EINTERNAL 5

#define GL_AXIS_FIRST 0
#define GL_AXIS_EUCLIDEAN 1

#define GL_MODEL_RW 0
#define GL_MODEL_SAW_EXACT 1
#define GL_MODEL_SAW_MC 2
#define GL_MODEL_OP_MC 3
#define GL_MODEL_OP_EXACT 4

typedef struct gl_dist gl_dist;
typedef struct gl_run gl_run;
typedef struct gl_lace gl_lace;

const char* gl_last_error(void);

/* --- step distributions --- */
int gl_dist_kac(int d, double alpha, double L, int R, gl_dist** out);
int gl_dist_nearest_neighbor(int d, gl_dist** out);
void gl_dist_free(gl_dist* dist);
int gl_dist_info(const gl_dist* dist, int* d, double* alpha, double* L, int* R,
                 double* sigma2, double* mass_deficit);
int gl_dist_weight(const gl_dist* dist, const int* x, double* out);
int gl_dist_fourier(const gl_dist* dist, const double* k, double* out);
int gl_dist_fit_small_k(const gl_dist* dist, const double* k_grid, int n, double* v,
                        double* exponent, int* log_correction, double* residual_rms);
int gl_dist_write_json(const gl_dist* dist, const char* path);

/* --- evolutions --- */
int gl_evolve_rw(const gl_dist* dist, int T, int B, double escape_tol, gl_run** out);
/* Streaming variant: keeps only moment series (one per entry of r_list),
 * not the per-t fields. */
int gl_evolve_rw_series(const gl_dist* dist, int T, int B, double escape_tol,
                        const double* r_list, int n_r, int axis, gl_run** out);
int gl_enumerate_saw(const gl_dist* dist, int T, double node_budget, gl_run** out);
int gl_sample_saw_mc(const gl_dist* dist, int T, long long n_trials, uint64_t seed,
                     const double* r_list, int n_r, int axis, gl_run** out);
int gl_simulate_op(const gl_dist* dist, double p, int T, long long n_trials, uint64_t seed,
                   const double* r_list, int n_r, int axis, gl_run** out);
int gl_op_exact(const gl_dist* dist, double p, int T, gl_run** out);
void gl_run_free(gl_run* run);

int gl_run_info(const gl_run* run, int* model, int* d, int* T);
int gl_run_total(const gl_run* run, int t, double* out);
int gl_run_escaped(const gl_run* run, int t, double* out);
int gl_run_moment(const gl_run* run, int t, double r, int axis, double* numerator,
                  double* denominator);
int gl_run_mc_moment(const gl_run* run, int r_index, int t, double* ratio, double* stderr_out,
                     int* usable);
int gl_run_mc_surviving(const gl_run* run, int t, long long* out);
int gl_run_fractional_moment(const gl_run* run, int t, double q, double* out);
int gl_run_gyration_radius(const gl_run* run, int t, double r, double* out);
int gl_run_write_field_csv(const gl_run* run, int t, const char* path);
int gl_run_write_series_csv(const gl_run* run, double r, int axis, const char* path);
/* Streaming runs only: series values recorded at evolution time. */
int gl_run_series_ratio(const gl_run* run, int r_index, int t, double* out);
int gl_run_series_write_csv(const gl_run* run, int r_index, const char* path);

/* --- theory scalars --- */
int gl_theory_amplitude(double r, double alpha, double* out);
int gl_theory_kq(double q, double* out);
int gl_theory_dc(double alpha, double* out);
int gl_theory_predict(double r, double alpha, double C, double v, long t, double* out);

/* --- lace expansion --- */
int gl_lace_invert_saw(const gl_run* run, const gl_dist* dist, gl_lace** out);
int gl_lace_invert_op(const gl_run* run, double p, const gl_dist* dist, gl_lace** out);
void gl_lace_free(gl_lace* lace);
int gl_lace_info(const gl_lace* lace, int* T, double* roundtrip_max_error, double* t1_residual);
int gl_lace_pi_at_origin(const gl_lace* lace, int t, double* out);
int gl_lace_pi_abs_sum(const gl_lace* lace, int t, double* out);
int gl_lace_write_pi_csv(const gl_lace* lace, int t, const char* path);
int gl_lace_diagram_check(const gl_lace* lace, const gl_run* run, const gl_dist* dist, int t,
                          int* pass, double* max_violation, int* first_diagram_only);
int gl_lace_estimate_mc(const double* totals, int n, double* m_c, int* window_lo, int* window_hi);
int gl_lace_convergence_sums(const gl_lace* lace, double m, double alpha, double eps,
                             double delta, double* S1, double* S2);
int gl_lace_estimate_C(const gl_lace* lace, const gl_dist* dist, double m_c, double alpha,
                       double* C, double* truncation_error, int* tail_warning);

/* --- fits (caller supplies the window as parallel arrays) --- */
int gl_fit_power_law(const double* t, const double* ratio, int n, double* exponent,
                     double* amplitude, double* residual_rms, double* exponent_se);
int gl_fit_log_corrected(const double* t, const double* ratio, int n, double* exponent,
                         double* amplitude, double* residual_rms, double* exponent_se);

#ifdef __cplusplus
}
#endif

#endif /* GYRALAB_H */
