#include "gyralab.h"

#include <cmath>
#include <cstring>
#include <span>
#include <string>

#include "gyra/fit.hpp"
#include "gyra/lace.hpp"
#include "gyra/stepdist.hpp"
#include "gyra/theory.hpp"
#include "gyra/walkers.hpp"

struct gl_dist {
  gyra::StepDistribution D;
};
struct gl_run {
  gyra::EvolutionRun run;
  std::vector<gyra::MomentSeries> series;  // streaming evolutions only
};
struct gl_lace {
  gyra::LaceSeries lace;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
int wrap(Fn&& fn) {
  try {
    fn();
    return GL_OK;
  } catch (const gyra::error& e) {
    g_last_error = e.what();
    return (int)e.code();
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GL_EINTERNAL;
  }
}

void check_ptr(const void* p, const char* what) {
  gyra::require(p != nullptr, gyra::errc::invalid, std::string("null ") + what);
}

gyra::Axis to_axis(int axis) {
  gyra::require(axis == GL_AXIS_FIRST || axis == GL_AXIS_EUCLIDEAN, gyra::errc::invalid,
                "bad axis code");
  return axis == GL_AXIS_FIRST ? gyra::Axis::first_coordinate : gyra::Axis::euclidean;
}

const gyra::Field& field_at(const gl_run* run, int t) {
  check_ptr(run, "run");
  gyra::require(!run->run.fields.empty(), gyra::errc::invalid, "run holds no stored fields");
  gyra::require(t >= 0 && t < (int)run->run.fields.size(), gyra::errc::invalid,
                "time index out of range");
  return run->run.fields[t];
}

std::vector<double> r_vec(const double* r_list, int n_r) {
  gyra::require(n_r > 0 && r_list != nullptr, gyra::errc::invalid, "empty moment-order list");
  return std::vector<double>(r_list, r_list + n_r);
}

}  // namespace

extern "C" {

const char* gl_last_error(void) { return g_last_error.c_str(); }

int gl_dist_kac(int d, double alpha, double L, int R, gl_dist** out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = new gl_dist{gyra::StepDistribution::kac(d, alpha, L, R)};
  });
}

int gl_dist_nearest_neighbor(int d, gl_dist** out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = new gl_dist{gyra::StepDistribution::nearest_neighbor(d)};
  });
}

void gl_dist_free(gl_dist* dist) { delete dist; }

int gl_dist_info(const gl_dist* dist, int* d, double* alpha, double* L, int* R, double* sigma2,
                 double* mass_deficit) {
  return wrap([&] {
    check_ptr(dist, "dist");
    if (d) *d = dist->D.dimension();
    if (alpha) *alpha = dist->D.alpha();
    if (L) *L = dist->D.scale();
    if (R) *R = dist->D.truncation_radius();
    if (sigma2) *sigma2 = dist->D.sigma2();
    if (mass_deficit) *mass_deficit = dist->D.total_mass_deficit();
  });
}

int gl_dist_weight(const gl_dist* dist, const int* x, double* out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(x, "point");
    check_ptr(out, "output pointer");
    *out = dist->D.weight(std::span<const int>(x, dist->D.dimension()));
  });
}

int gl_dist_fourier(const gl_dist* dist, const double* k, double* out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(k, "wave vector");
    check_ptr(out, "output pointer");
    *out = dist->D.fourier(std::span<const double>(k, dist->D.dimension()));
  });
}

int gl_dist_fit_small_k(const gl_dist* dist, const double* k_grid, int n, double* v,
                        double* exponent, int* log_correction, double* residual_rms) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(k_grid, "k grid");
    auto prof = dist->D.fit_small_k(std::span<const double>(k_grid, (std::size_t)std::max(n, 0)));
    if (v) *v = prof.fitted_v;
    if (exponent) *exponent = prof.fitted_exponent;
    if (log_correction) *log_correction = prof.log_correction ? 1 : 0;
    if (residual_rms) *residual_rms = prof.residual_rms;
  });
}

int gl_dist_write_json(const gl_dist* dist, const char* path) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(path, "path");
    dist->D.write_json(path);
  });
}

int gl_evolve_rw(const gl_dist* dist, int T, int B, double escape_tol, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_run{gyra::evolve_rw(dist->D, T, B, escape_tol)};
  });
}

int gl_evolve_rw_series(const gl_dist* dist, int T, int B, double escape_tol,
                        const double* r_list, int n_r, int axis, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    auto run = new gl_run{};
    try {
      run->series = gyra::evolve_rw_series(dist->D, T, B, r_vec(r_list, n_r), to_axis(axis),
                                           escape_tol);
      run->run.model = gyra::Model::rw;
      run->run.d = dist->D.dimension();
      run->run.T = T;
    } catch (...) {
      delete run;
      throw;
    }
    *out = run;
  });
}

int gl_enumerate_saw(const gl_dist* dist, int T, double node_budget, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_run{gyra::enumerate_saw(dist->D, T, node_budget)};
  });
}

int gl_sample_saw_mc(const gl_dist* dist, int T, long long n_trials, uint64_t seed,
                     const double* r_list, int n_r, int axis, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_run{
        gyra::sample_saw_mc(dist->D, T, n_trials, seed, r_vec(r_list, n_r), to_axis(axis))};
  });
}

int gl_simulate_op(const gl_dist* dist, double p, int T, long long n_trials, uint64_t seed,
                   const double* r_list, int n_r, int axis, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    gyra::OPConfig cfg;
    cfg.p = p;
    cfg.T = T;
    cfg.n_trials = n_trials;
    cfg.seed = seed;
    cfg.r_list = r_vec(r_list, n_r);
    cfg.axis = to_axis(axis);
    *out = new gl_run{gyra::simulate_op(dist->D, cfg)};
  });
}

int gl_op_exact(const gl_dist* dist, double p, int T, gl_run** out) {
  return wrap([&] {
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_run{gyra::op_exact_small_t(dist->D, p, T)};
  });
}

void gl_run_free(gl_run* run) { delete run; }

int gl_run_info(const gl_run* run, int* model, int* d, int* T) {
  return wrap([&] {
    check_ptr(run, "run");
    if (model) *model = (int)run->run.model;
    if (d) *d = run->run.d;
    if (T) *T = run->run.T;
  });
}

int gl_run_total(const gl_run* run, int t, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = field_at(run, t).total();
  });
}

int gl_run_escaped(const gl_run* run, int t, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = field_at(run, t).escaped();
  });
}

int gl_run_moment(const gl_run* run, int t, double r, int axis, double* numerator,
                  double* denominator) {
  return wrap([&] {
    auto m = gyra::absolute_moment(field_at(run, t), r, to_axis(axis));
    if (numerator) *numerator = m.numerator;
    if (denominator) *denominator = m.denominator;
  });
}

int gl_run_mc_moment(const gl_run* run, int r_index, int t, double* ratio, double* stderr_out,
                     int* usable) {
  return wrap([&] {
    check_ptr(run, "run");
    gyra::require(run->run.mc.has_value(), gyra::errc::invalid, "run has no Monte Carlo data");
    double rr = 0, se = 0;
    bool ok = run->run.mc->moment_ratio(r_index, t, &rr, &se);
    if (ratio) *ratio = rr;
    if (stderr_out) *stderr_out = se;
    if (usable) *usable = ok ? 1 : 0;
  });
}

int gl_run_mc_surviving(const gl_run* run, int t, long long* out) {
  return wrap([&] {
    check_ptr(run, "run");
    check_ptr(out, "output pointer");
    gyra::require(run->run.mc.has_value(), gyra::errc::invalid, "run has no Monte Carlo data");
    gyra::require(t >= 0 && t < (int)run->run.mc->surviving.size(), gyra::errc::invalid,
                  "time index out of range");
    *out = run->run.mc->surviving[t];
  });
}

int gl_run_fractional_moment(const gl_run* run, int t, double q, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = gyra::fractional_moment_via_integral(field_at(run, t), q);
  });
}

int gl_run_gyration_radius(const gl_run* run, int t, double r, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = gyra::gyration_radius(field_at(run, t), r);
  });
}

int gl_run_write_field_csv(const gl_run* run, int t, const char* path) {
  return wrap([&] {
    check_ptr(path, "path");
    gyra::write_field_csv(field_at(run, t), path);
  });
}

int gl_run_write_series_csv(const gl_run* run, double r, int axis, const char* path) {
  return wrap([&] {
    check_ptr(run, "run");
    check_ptr(path, "path");
    gyra::require(!run->run.fields.empty(), gyra::errc::invalid, "run holds no stored fields");
    gyra::MomentSeries s;
    s.r = r;
    s.axis = to_axis(axis);
    for (int t = 0; t < (int)run->run.fields.size(); ++t) {
      auto m = gyra::absolute_moment(run->run.fields[t], r, s.axis);
      if (m.denominator <= 0) continue;
      s.entries.push_back({t, m.numerator, m.denominator, m.numerator / m.denominator});
    }
    gyra::write_moment_series_csv(s, path);
  });
}

namespace {

const gyra::MomentSeries& series_at(const gl_run* run, int r_index) {
  check_ptr(run, "run");
  gyra::require(!run->series.empty(), gyra::errc::invalid, "run holds no streamed series");
  gyra::require(r_index >= 0 && r_index < (int)run->series.size(), gyra::errc::invalid,
                "series index out of range");
  return run->series[r_index];
}

}  // namespace

int gl_run_series_ratio(const gl_run* run, int r_index, int t, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    const auto& s = series_at(run, r_index);
    for (const auto& e : s.entries) {
      if (e.t == t) {
        *out = e.ratio;
        return;
      }
    }
    gyra::fail(gyra::errc::invalid, "no series entry at the requested time");
  });
}

int gl_run_series_write_csv(const gl_run* run, int r_index, const char* path) {
  return wrap([&] {
    check_ptr(path, "path");
    gyra::write_moment_series_csv(series_at(run, r_index), path);
  });
}

int gl_theory_amplitude(double r, double alpha, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = gyra::theory::universal_amplitude(r, alpha);
  });
}

int gl_theory_kq(double q, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = gyra::theory::K_q(q);
  });
}

int gl_theory_dc(double alpha, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    *out = gyra::theory::upper_critical_dimension(alpha);
  });
}

int gl_theory_predict(double r, double alpha, double C, double v, long t, double* out) {
  return wrap([&] {
    check_ptr(out, "output pointer");
    gyra::TheoryPrediction pred{.r = r, .alpha = alpha, .C = C, .v = v};
    *out = pred.predict(t);
  });
}

int gl_lace_invert_saw(const gl_run* run, const gl_dist* dist, gl_lace** out) {
  return wrap([&] {
    check_ptr(run, "run");
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_lace{gyra::invert_lace_saw(run->run, dist->D)};
  });
}

int gl_lace_invert_op(const gl_run* run, double p, const gl_dist* dist, gl_lace** out) {
  return wrap([&] {
    check_ptr(run, "run");
    check_ptr(dist, "dist");
    check_ptr(out, "output pointer");
    *out = new gl_lace{gyra::invert_lace_op(run->run, p, dist->D)};
  });
}

void gl_lace_free(gl_lace* lace) { delete lace; }

int gl_lace_info(const gl_lace* lace, int* T, double* roundtrip_max_error, double* t1_residual) {
  return wrap([&] {
    check_ptr(lace, "lace");
    if (T) *T = lace->lace.T;
    if (roundtrip_max_error) *roundtrip_max_error = lace->lace.roundtrip_max_error;
    if (t1_residual) *t1_residual = lace->lace.t1_residual;
  });
}

int gl_lace_pi_at_origin(const gl_lace* lace, int t, double* out) {
  return wrap([&] {
    check_ptr(lace, "lace");
    check_ptr(out, "output pointer");
    gyra::require(t >= 0 && t < (int)lace->lace.pi.size(), gyra::errc::invalid,
                  "time index out of range");
    std::vector<int> o(lace->lace.d, 0);
    *out = lace->lace.pi[t].at(o);
  });
}

int gl_lace_pi_abs_sum(const gl_lace* lace, int t, double* out) {
  return wrap([&] {
    check_ptr(lace, "lace");
    check_ptr(out, "output pointer");
    gyra::require(t >= 0 && t < (int)lace->lace.pi.size(), gyra::errc::invalid,
                  "time index out of range");
    gyra::KahanSum sum;
    lace->lace.pi[t].for_each(
        [&](std::span<const int>, double v) { sum.add(std::abs(v)); });
    *out = sum.value();
  });
}

int gl_lace_write_pi_csv(const gl_lace* lace, int t, const char* path) {
  return wrap([&] {
    check_ptr(lace, "lace");
    check_ptr(path, "path");
    gyra::require(t >= 0 && t < (int)lace->lace.pi.size(), gyra::errc::invalid,
                  "time index out of range");
    gyra::write_field_csv(lace->lace.pi[t], path);
  });
}

int gl_lace_diagram_check(const gl_lace* lace, const gl_run* run, const gl_dist* dist, int t,
                          int* pass, double* max_violation, int* first_diagram_only) {
  return wrap([&] {
    check_ptr(lace, "lace");
    check_ptr(run, "run");
    check_ptr(dist, "dist");
    auto rep = gyra::diagram_bound_check(lace->lace, run->run, dist->D, t);
    if (pass) *pass = rep.pass ? 1 : 0;
    if (max_violation) *max_violation = rep.max_violation;
    if (first_diagram_only) *first_diagram_only = rep.first_diagram_only ? 1 : 0;
  });
}

int gl_lace_estimate_mc(const double* totals, int n, double* m_c, int* window_lo,
                        int* window_hi) {
  return wrap([&] {
    check_ptr(totals, "totals");
    auto est = gyra::estimate_mc(std::vector<double>(totals, totals + std::max(n, 0)));
    if (m_c) *m_c = est.value;
    if (window_lo) *window_lo = est.window_lo;
    if (window_hi) *window_hi = est.window_hi;
  });
}

int gl_lace_convergence_sums(const gl_lace* lace, double m, double alpha, double eps,
                             double delta, double* S1, double* S2) {
  return wrap([&] {
    check_ptr(lace, "lace");
    auto sums = gyra::convergence_sums(lace->lace, m, alpha, eps, delta);
    if (S1) *S1 = sums.S1;
    if (S2) *S2 = sums.S2;
  });
}

int gl_lace_estimate_C(const gl_lace* lace, const gl_dist* dist, double m_c, double alpha,
                       double* C, double* truncation_error, int* tail_warning) {
  return wrap([&] {
    check_ptr(lace, "lace");
    check_ptr(dist, "dist");
    auto est = gyra::estimate_C_alpha(lace->lace, dist->D, m_c, alpha);
    if (C) *C = est.C;
    if (truncation_error) *truncation_error = est.truncation_error;
    if (tail_warning) *tail_warning = est.tail_warning ? 1 : 0;
  });
}

namespace {

gyra::MomentSeries series_from_arrays(const double* t, const double* ratio, int n) {
  check_ptr(t, "t array");
  check_ptr(ratio, "ratio array");
  gyra::require(n > 0, gyra::errc::invalid, "empty fit window");
  gyra::MomentSeries s;
  for (int i = 0; i < n; ++i) {
    int ti = (int)std::lround(t[i]);
    gyra::require(std::abs(t[i] - ti) < 1e-9, gyra::errc::invalid, "non-integer time value");
    s.entries.push_back({ti, ratio[i], 1.0, ratio[i]});
  }
  return s;
}

}  // namespace

int gl_fit_power_law(const double* t, const double* ratio, int n, double* exponent,
                     double* amplitude, double* residual_rms, double* exponent_se) {
  return wrap([&] {
    auto s = series_from_arrays(t, ratio, n);
    auto fit = gyra::fit_power_law(s, s.entries.front().t, s.entries.back().t);
    if (exponent) *exponent = fit.exponent;
    if (amplitude) *amplitude = fit.amplitude;
    if (residual_rms) *residual_rms = fit.residual_rms;
    if (exponent_se) *exponent_se = fit.exponent_se;
  });
}

int gl_fit_log_corrected(const double* t, const double* ratio, int n, double* exponent,
                         double* amplitude, double* residual_rms, double* exponent_se) {
  return wrap([&] {
    auto s = series_from_arrays(t, ratio, n);
    auto fit = gyra::fit_log_corrected(s, 0.0, s.entries.front().t, s.entries.back().t);
    if (exponent) *exponent = fit.exponent;
    if (amplitude) *amplitude = fit.amplitude;
    if (residual_rms) *residual_rms = fit.residual_rms;
    if (exponent_se) *exponent_se = fit.exponent_se;
  });
}

}  // extern "C"
