#include "gyra/fit.hpp"

#include <cmath>
#include <vector>

namespace gyra {

namespace {

struct LinFit {
  double slope = 0, intercept = 0, rms = 0, slope_se = 0;
};

LinFit linear_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinFit fit;
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double resid = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += resid * resid;
  }
  fit.rms = std::sqrt(ss / n);
  if (n > 2) {
    double s2 = ss / (n - 2);
    fit.slope_se = std::sqrt(s2 * n / denom);
  }
  return fit;
}

void collect_window(const MomentSeries& series, int t_min, int t_max,
                    std::vector<double>* ts, std::vector<double>* ratios) {
  for (const auto& e : series.entries) {
    if (e.t < t_min || e.t > t_max) continue;
    require(e.ratio > 0, errc::invalid, "nonpositive ratio at t = " + std::to_string(e.t));
    ts->push_back((double)e.t);
    ratios->push_back(e.ratio);
  }
  require(ts->size() >= 5, errc::invalid, "need at least 5 points in the fit window");
}

}  // namespace

FitResult fit_power_law(const MomentSeries& series, int t_min, int t_max) {
  std::vector<double> ts, ratios;
  collect_window(series, t_min, t_max, &ts, &ratios);
  std::vector<double> lx(ts.size()), ly(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    lx[i] = std::log(ts[i]);
    ly[i] = std::log(ratios[i]);
  }
  LinFit lin = linear_least_squares(lx, ly);
  FitResult fit;
  fit.r = series.r;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.exponent = lin.slope;
  fit.amplitude = std::exp(lin.intercept);
  fit.residual_rms = lin.rms;
  fit.exponent_se = lin.slope_se;
  return fit;
}

FitResult fit_log_corrected(const MomentSeries& series, double r, int t_min, int t_max) {
  // one-parameter fit of ratio = c (t log sqrt(t))^{r/2}: the exponent is
  // pinned by the model class, only the amplitude is free
  std::vector<double> ts, ratios;
  collect_window(series, t_min, t_max, &ts, &ratios);
  double theta = r / 2.0;
  double mean = 0;
  std::vector<double> dev(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    require(ts[i] >= 2, errc::invalid, "log-corrected fit needs t >= 2");
    dev[i] = std::log(ratios[i]) - theta * std::log(ts[i] * std::log(std::sqrt(ts[i])));
    mean += dev[i];
  }
  mean /= ts.size();
  double ss = 0;
  for (double d : dev) ss += (d - mean) * (d - mean);
  FitResult fit;
  fit.r = r;
  fit.alpha = 2.0;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.exponent = theta;
  fit.amplitude = std::exp(mean);
  fit.residual_rms = std::sqrt(ss / ts.size());
  fit.exponent_se = 0.0;
  fit.log_corrected = true;
  return fit;
}

ComparisonReport compare_to_theory(const FitResult& fit, const TheoryPrediction& pred) {
  require(fit.r == pred.r, errc::invalid, "moment order mismatch");
  require(fit.alpha == 0.0 || fit.alpha == pred.alpha, errc::invalid, "alpha mismatch");
  ComparisonReport rep;
  double chi = std::min(pred.alpha, 2.0);
  rep.theta_hat = fit.exponent;
  rep.theta_target = pred.r / chi;
  rep.c_hat = fit.amplitude;
  rep.c_theory = pred.amplitude() * std::pow(pred.C * pred.v, pred.r / chi);
  rep.rel_dev_exponent = std::abs(rep.theta_hat - rep.theta_target) / rep.theta_target;
  rep.rel_dev_amplitude = std::abs(rep.c_hat - rep.c_theory) / rep.c_theory;
  return rep;
}

}  // namespace gyra
