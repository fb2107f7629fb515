#pragma once

#include <span>
#include <string>
#include <vector>

#include "gyra/common.hpp"

namespace gyra {

// Least-squares profile of the small-k singularity of 1 - D^(k).
struct FourierProfile {
  std::vector<double> k;
  std::vector<double> value;  // 1 - D^(k e1)
  double fitted_v = 0.0;
  double fitted_exponent = 0.0;
  bool log_correction = false;
  double residual_rms = 0.0;
  double k_min = 0.0, k_max = 0.0;
};

// Z^d-symmetric 1-step law on the truncated box [-R, R]^d, renormalized to
// total mass 1.  Immutable after construction.
class StepDistribution {
 public:
  // Kac law: weights proportional to (|x/L| v 1)^{-d-alpha}.
  static StepDistribution kac(int d, double alpha, double L, int R);

  // Uniform nearest-neighbor law (finite range; alpha treated as infinite).
  static StepDistribution nearest_neighbor(int d);

  int dimension() const { return d_; }
  double alpha() const { return alpha_; }
  double scale() const { return L_; }
  int truncation_radius() const { return R_; }
  double total_mass_deficit() const { return deficit_; }

  // D(x); zero outside the box.
  double weight(std::span<const int> x) const;
  const std::vector<double>& weights() const { return w_; }

  // Marginal of the first coordinate, indexed by x1 + R.
  const std::vector<double>& axis_marginal() const { return marginal_; }

  // Sum_x cos(k.x) D(x) for k in [-pi, pi]^d.
  double fourier(std::span<const double> k) const;
  // D^ along the first axis; uses the cached marginal.
  double fourier_axis(double k1) const;

  double sigma2() const { return sigma2_; }            // sum |x|^2 D(x)
  double sigma2_axis() const { return sigma2_axis_; }  // sum x1^2 D(x)

  FourierProfile fit_small_k(std::span<const double> k_grid) const;

  void write_json(const std::string& path) const;

  // Flat index helpers for the [-R, R]^d box (lexicographic in x).
  std::size_t point_count() const { return w_.size(); }
  void unflatten(std::size_t idx, int* x) const;

 private:
  StepDistribution() = default;
  void finalize();  // normalize, build marginal and moments

  int d_ = 1;
  double alpha_ = 0.0;
  double L_ = 1.0;
  int R_ = 1;
  std::vector<double> w_;
  std::vector<double> marginal_;
  double deficit_ = 0.0;
  double sigma2_ = 0.0;
  double sigma2_axis_ = 0.0;
};

}  // namespace gyra
