#include "gyra/lace.hpp"

#include <algorithm>
#include <cmath>

namespace gyra {

namespace {

Field field_from_dist(const StepDistribution& D, const Field& like) {
  Field f = Field::zeros_like(like);
  f.set_time_index(1);
  std::vector<int> x(D.dimension());
  for (std::size_t i = 0; i < D.point_count(); ++i) {
    if (D.weights()[i] == 0.0) continue;
    D.unflatten(i, x.data());
    f.add(std::span<const int>(x.data(), x.size()), D.weights()[i]);
  }
  return f;
}

void axpy(Field& dst, const Field& src, double coef) {
  src.for_each([&](std::span<const int> x, double v) { dst.add(x, coef * v); });
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0;
  std::vector<int> xv;
  a.for_each([&](std::span<const int> x, double v) {
    m = std::max(m, std::abs(v - b.at(x)));
  });
  b.for_each([&](std::span<const int> x, double v) {
    m = std::max(m, std::abs(v - a.at(x)));
  });
  return m;
}

double max_abs(const Field& f) {
  double m = 0;
  f.for_each([&](std::span<const int>, double v) { m = std::max(m, std::abs(v)); });
  return m;
}

// sum_x cos(k x1) f(x)
double fourier_axis(const Field& f, double k) {
  KahanSum sum;
  f.for_each([&](std::span<const int> x, double v) { sum.add(std::cos(k * x[0]) * v); });
  return sum.value();
}

double axis_second_moment(const Field& f) {
  KahanSum sum;
  f.for_each([&](std::span<const int> x, double v) { sum.add((double)x[0] * x[0] * v); });
  return sum.value();
}

double roundtrip_error(const LaceSeries& series, const EvolutionRun& run,
                       const StepDistribution& D) {
  double worst = 0;
  for (int t = 1; t <= series.T; ++t) {
    Field recon = Field::zeros_like(run.fields[t]);
    for (int s = 1; s <= t; ++s) {
      Field Js = series.J(s, D);
      if (s == t) {
        // phi_0 is a delta, so J_t * phi_0 = J_t
        axpy(recon, Js, 1.0);
      } else {
        axpy(recon, convolve_fields(Js, run.fields[t - s]), 1.0);
      }
    }
    if (series.model == Model::op_exact) axpy(recon, series.pi[t], 1.0);  // I_t = pi_t
    worst = std::max(worst, max_abs_diff(recon, run.fields[t]));
  }
  return worst;
}

}  // namespace

Field LaceSeries::J(int t, const StepDistribution& D) const {
  require(t >= 1 && t <= T, errc::invalid, "t out of range");
  if (model == Model::op_exact) {
    Field f = convolve(pi[t - 1], D);
    f.scale(p);
    f.set_time_index(t);
    return f;
  }
  if (t == 1) {
    Field f = field_from_dist(D, pi[1]);
    axpy(f, pi[1], 1.0);
    return f;
  }
  return pi[t];
}

LaceSeries invert_lace_saw(const EvolutionRun& run, const StepDistribution& D) {
  require(run.model == Model::saw_exact || run.model == Model::rw, errc::invalid,
          "lace inversion requires an exact source run");
  require(run.T >= 2, errc::invalid, "need T >= 2");
  LaceSeries series;
  series.model = Model::saw_exact;
  series.d = run.d;
  series.T = run.T;

  // pi_t = 0 for t <= 1 by convention; residual at t = 1 is flagged
  series.pi.push_back(Field::zeros_like(run.fields[0]));
  series.pi.push_back(Field::zeros_like(run.fields[0]));
  series.t1_residual = max_abs_diff(run.fields[1], field_from_dist(D, run.fields[1]));

  for (int t = 2; t <= run.T; ++t) {
    Field pi_t = Field::zeros_like(run.fields[t]);
    axpy(pi_t, run.fields[t], 1.0);
    axpy(pi_t, convolve(run.fields[t - 1], D), -1.0);
    for (int s = 2; s <= t - 1; ++s)
      axpy(pi_t, convolve_fields(series.pi[s], run.fields[t - s]), -1.0);
    pi_t.set_time_index(t);
    series.pi.push_back(std::move(pi_t));
  }
  series.roundtrip_max_error = roundtrip_error(series, run, D);
  return series;
}

LaceSeries invert_lace_op(const EvolutionRun& run, double p, const StepDistribution& D) {
  require(run.model == Model::op_exact, errc::invalid,
          "OP lace inversion requires an exhaustively exact source run");
  LaceSeries series;
  series.model = Model::op_exact;
  series.d = run.d;
  series.T = run.T;
  series.p = p;

  // pi_0 = phi_0 = delta
  Field pi0 = Field::zeros_like(run.fields[0]);
  axpy(pi0, run.fields[0], 1.0);
  series.pi.push_back(std::move(pi0));
  for (int t = 1; t <= run.T; ++t) {
    Field pi_t = Field::zeros_like(run.fields[t]);
    axpy(pi_t, run.fields[t], 1.0);
    for (int s = 1; s <= t; ++s) {
      Field Js = series.J(s, D);  // uses pi[s-1], already available
      if (s == t)
        axpy(pi_t, Js, -1.0);
      else
        axpy(pi_t, convolve_fields(Js, run.fields[t - s]), -1.0);
    }
    pi_t.set_time_index(t);
    series.pi.push_back(std::move(pi_t));
  }
  series.roundtrip_max_error = roundtrip_error(series, run, D);
  return series;
}

DiagramBoundReport diagram_bound_check(const LaceSeries& series, const EvolutionRun& phi,
                                       const StepDistribution& D, int t) {
  DiagramBoundReport rep;
  rep.t = t;
  if (series.model == Model::op_exact) {
    require(t >= 1 && t <= series.T, errc::invalid, "t out of range");
    rep.first_diagram_only = true;
    double violation = -1e300;
    series.pi[t].for_each([&](std::span<const int> x, double v) {
      double bound = phi.fields[t].at(x);
      violation = std::max(violation, std::abs(v) - bound * bound);
      rep.max_abs_pi = std::max(rep.max_abs_pi, std::abs(v));
    });
    rep.max_violation = std::max(violation, 0.0);
    rep.pass = violation <= 1e-12;
    return rep;
  }

  require(t >= 2 && t <= 4, errc::invalid,
          "only t in {2, 3, 4} is supported (higher diagrams are not fully specified)");
  require(t <= series.T, errc::invalid, "t exceeds series horizon");

  // diagram 1: self-avoiding loop through the origin, (D * phi_{t-1})(o) delta_{x,o}
  Field bound = Field::zeros_like(phi.fields[t]);
  {
    std::vector<int> o(series.d, 0);
    std::span<const int> os(o.data(), o.size());
    bound.add(os, convolve(phi.fields[t - 1], D).at(os));
  }
  // diagram 2: pointwise product of three 2-point functions
  for (int s1 = 1; s1 <= t - 2; ++s1)
    for (int s2 = 1; s2 + s1 <= t - 1; ++s2) {
      int s3 = t - s1 - s2;
      phi.fields[s1].for_each([&](std::span<const int> x, double v) {
        bound.add(x, v * phi.fields[s2].at(x) * phi.fields[s3].at(x));
      });
    }

  double violation = -1e300;
  series.pi[t].for_each([&](std::span<const int> x, double v) {
    violation = std::max(violation, std::abs(v) - bound.at(x));
    rep.max_abs_pi = std::max(rep.max_abs_pi, std::abs(v));
  });
  rep.max_violation = std::max(violation, 0.0);
  rep.pass = violation <= 1e-12;
  return rep;
}

McEstimate estimate_mc(const std::vector<double>& totals) {
  require(totals.size() >= 6, errc::invalid, "need at least 6 consecutive totals");
  for (double v : totals) require(v > 0, errc::invalid, "totals must be positive");
  McEstimate est;
  for (std::size_t t = 0; t + 1 < totals.size(); ++t)
    est.ratios.push_back(totals[t] / totals[t + 1]);
  // smooth the even/odd oscillation of loose-packed lattices with the
  // geometric mean of adjacent ratios, sqrt(totals_{t-1} / totals_{t+1}),
  // then first-order Richardson to remove the residual 1/t correction
  std::vector<double> smooth(est.ratios.size(), 0.0);
  for (std::size_t t = 1; t < est.ratios.size(); ++t)
    smooth[t] = std::sqrt(est.ratios[t - 1] * est.ratios[t]);
  for (std::size_t t = 2; t < smooth.size(); ++t)
    est.extrapolated.push_back((double)t * smooth[t] - (double)(t - 1) * smooth[t - 1]);

  double best_var = 1e300;
  int n = (int)est.extrapolated.size();
  for (int w = 3; w <= 5; ++w) {
    if (n < w) continue;
    double mean = 0;
    for (int i = n - w; i < n; ++i) mean += est.extrapolated[i];
    mean /= w;
    double var = 0;
    for (int i = n - w; i < n; ++i)
      var += (est.extrapolated[i] - mean) * (est.extrapolated[i] - mean);
    var /= w;
    if (var < best_var) {
      best_var = var;
      est.value = mean;
      est.window_lo = n - w;
      est.window_hi = n - 1;
    }
  }
  if (n > 0 && est.value == 0.0) {
    est.value = est.extrapolated.back();
    est.window_lo = est.window_hi = n - 1;
  }
  if (n == 0) est.value = est.ratios.back();
  return est;
}

ConvergenceSums convergence_sums(const LaceSeries& series, double m, double alpha, double eps,
                                 double delta) {
  ConvergenceSums out;
  double chi = std::min(alpha, 2.0);
  KahanSum s1, s2;
  for (int t = 0; t <= series.T; ++t) {
    KahanSum abs_sum, mom_sum;
    series.pi[t].for_each([&](std::span<const int> x, double v) {
      abs_sum.add(std::abs(v));
      if (x[0] != 0) mom_sum.add(std::pow(std::abs((double)x[0]), chi + delta) * std::abs(v));
    });
    double mt = std::pow(m, t);
    double inc1 = std::pow((double)t, 1.0 + eps) * mt * abs_sum.value();
    double inc2 = mt * mom_sum.value();
    out.increments1.push_back(inc1);
    out.increments2.push_back(inc2);
    s1.add(inc1);
    s2.add(inc2);
  }
  out.S1 = s1.value();
  out.S2 = s2.value();
  return out;
}

CAlphaEstimate estimate_C_alpha(const LaceSeries& series, const StepDistribution& D, double m_c,
                                double alpha) {
  require(m_c > 0, errc::invalid, "m_c must be positive");
  CAlphaEstimate est;

  std::vector<Field> J;
  for (int t = 1; t <= series.T; ++t) J.push_back(series.J(t, D));

  KahanSum dm;  // sum_t t m_c^{t-1} J^_t(0)
  std::vector<double> dm_inc;
  for (int t = 1; t <= series.T; ++t) {
    double inc = t * std::pow(m_c, t - 1) * J[t - 1].total();
    dm_inc.push_back(inc);
    dm.add(inc);
  }
  double dmJ = dm.value();
  require(dmJ != 0.0, errc::internal, "degenerate J series");

  if (alpha > 2.0) {
    KahanSum grad2;  // -nabla_1^2 J^(0) = sum_t m_c^t sum_x x1^2 J_t
    for (int t = 1; t <= series.T; ++t) grad2.add(std::pow(m_c, t) * axis_second_moment(J[t - 1]));
    double grad2_D = D.sigma2_axis();
    est.C = grad2.value() / grad2_D / (m_c * dmJ);
  } else {
    double k0 = 0.5;
    for (int i = 0; i < 7; ++i) est.k_grid.push_back(k0 / std::pow(2.0, i));
    std::vector<double> dens;
    for (double k : est.k_grid) {
      KahanSum num;
      for (int t = 1; t <= series.T; ++t)
        num.add(std::pow(m_c, t) * (J[t - 1].total() - fourier_axis(J[t - 1], k)));
      double den = 1.0 - D.fourier_axis(k);
      est.ratio_at_k.push_back(num.value() / den);
      dens.push_back(den);
    }
    // linear extrapolation of the ratio in D^(0) - D^(k) down to 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = (int)dens.size();
    for (int i = 0; i < n; ++i) {
      sx += dens[i];
      sy += est.ratio_at_k[i];
      sxx += dens[i] * dens[i];
      sxy += dens[i] * est.ratio_at_k[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    est.C = intercept / (m_c * dmJ);
  }

  // tail diagnostics from the interaction part (t >= 2) of the m-derivative
  double sum_abs = std::abs(dmJ);
  if (series.T >= 3) {
    double last = std::abs(dm_inc[series.T - 1]);
    double prev = std::abs(dm_inc[series.T - 2]);
    est.truncation_error = sum_abs > 0 ? last / sum_abs : 0.0;
    est.tail_warning = last > prev && last > 1e-14;
  }
  return est;
}

}  // namespace gyra
