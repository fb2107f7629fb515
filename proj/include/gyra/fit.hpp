#pragma once

#include <string>

#include "gyra/field.hpp"
#include "gyra/theory.hpp"

namespace gyra {

struct FitResult {
  std::string model_tag;
  double r = 0.0;
  double alpha = 0.0;
  int t_min = 0, t_max = 0;
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual_rms = 0.0;  // in log coordinates
  double exponent_se = 0.0;
  bool log_corrected = false;
};

// Least squares of log(ratio) on log(t) over the window.
FitResult fit_power_law(const MomentSeries& series, int t_min, int t_max);

// alpha = 2 form: least squares of log(ratio) on log(t log sqrt(t)); the
// expected exponent is r/2 and the fitted amplitude multiplies
// (t log sqrt(t))^{exponent}.
FitResult fit_log_corrected(const MomentSeries& series, double r, int t_min, int t_max);

struct ComparisonReport {
  double theta_hat = 0.0, theta_target = 0.0;
  double c_hat = 0.0, c_theory = 0.0;
  double rel_dev_exponent = 0.0;
  double rel_dev_amplitude = 0.0;
};

// Deviations of a fit from the sharp-asymptotics prediction with constants
// (C, v) from the supplied TheoryPrediction.
ComparisonReport compare_to_theory(const FitResult& fit, const TheoryPrediction& pred);

}  // namespace gyra
