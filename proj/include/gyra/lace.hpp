#pragma once

#include <vector>

#include "gyra/field.hpp"
#include "gyra/walkers.hpp"

namespace gyra {

// Lace-expansion coefficients pi_t extracted from an exact 2-point series
// by convolution inversion, plus the derived J series.
struct LaceSeries {
  Model model = Model::saw_exact;
  int d = 1;
  int T = 0;
  double p = 0.0;  // OP only
  std::vector<Field> pi;  // t = 0..T; entries may be negative
  double roundtrip_max_error = 0.0;
  double t1_residual = 0.0;  // SAW: any mass the inversion left at t = 1

  // J_t(x): D delta_{t,1} + pi_t for SAW, p (D * pi_{t-1}) for OP.
  Field J(int t, const StepDistribution& D) const;
};

LaceSeries invert_lace_saw(const EvolutionRun& run, const StepDistribution& D);
LaceSeries invert_lace_op(const EvolutionRun& run, double p, const StepDistribution& D);

struct DiagramBoundReport {
  int t = 0;
  bool pass = false;
  double max_violation = 0.0;  // max over x of |pi_t(x)| - bound(x)
  double max_abs_pi = 0.0;
  bool first_diagram_only = false;  // OP: only |pi_t| <= phi_t^2 is checked
};

// SAW: |pi_t(x)| <= (D*phi_{t-1})(o) delta_{x,o} + sum_{s1+s2+s3=t} prod phi_si(x)
// (first two diagrams of the alternating expansion only; the third diagram
// first contributes at t = 4, so the truncated bound is genuinely violated
// there -- the report says so honestly).
// OP:  |pi_t(x)| <= phi_t(x)^2 (first diagram only).
DiagramBoundReport diagram_bound_check(const LaceSeries& series, const EvolutionRun& phi,
                                       const StepDistribution& D, int t);

struct McEstimate {
  double value = 0.0;
  std::vector<double> ratios;        // totals_t / totals_{t+1}
  std::vector<double> extrapolated;  // Richardson of the parity-smoothed ratios
  int window_lo = 0, window_hi = 0;
};

// Ratio-method estimate of the radius of convergence of sum_t m^t totals_t.
McEstimate estimate_mc(const std::vector<double>& totals);

struct ConvergenceSums {
  double S1 = 0.0;  // sum_t t^{1+eps} m^t sum_x |pi_t|
  double S2 = 0.0;  // sum_t m^t sum_x |x1|^{alpha^2+delta} |pi_t|
  std::vector<double> increments1, increments2;  // per t
};

ConvergenceSums convergence_sums(const LaceSeries& series, double m, double alpha, double eps,
                                 double delta);

struct CAlphaEstimate {
  double C = 1.0;
  double truncation_error = 0.0;  // |last t-increment| / |sum|
  bool tail_warning = false;      // increments not decreasing
  std::vector<double> k_grid;     // alpha <= 2 branch only
  std::vector<double> ratio_at_k;
};

// C_alpha from the truncated J series at m = m_c (Fourier derivative form
// for alpha > 2, small-k limit form otherwise).
CAlphaEstimate estimate_C_alpha(const LaceSeries& series, const StepDistribution& D, double m_c,
                                double alpha);

}  // namespace gyra
