#include "gyra/stepdist.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace gyra {

namespace {

// h(x) = (|x| v 1)^{-d-alpha}, evaluated at x/L.
double kac_h(double norm_over_L, int d, double alpha) {
  double base = std::max(norm_over_L, 1.0);
  return std::pow(base, -(d + alpha));
}

// Sum of h(x/L) over the box [-R, R]^d.
double kac_box_sum(int d, double alpha, double L, long R) {
  long side = 2 * R + 1;
  KahanSum sum;
  if (d == 1) {
    for (long x = -R; x <= R; ++x) sum.add(kac_h(std::abs((double)x) / L, d, alpha));
  } else if (d == 2) {
    for (long x = -R; x <= R; ++x) {
      double x2 = (double)x * x;
      for (long y = -R; y <= R; ++y)
        sum.add(kac_h(std::sqrt(x2 + (double)y * y) / L, d, alpha));
    }
  } else {
    for (long x = -R; x <= R; ++x)
      for (long y = -R; y <= R; ++y) {
        double xy2 = (double)x * x + (double)y * y;
        for (long z = -R; z <= R; ++z)
          sum.add(kac_h(std::sqrt(xy2 + (double)z * z) / L, d, alpha));
      }
  }
  return sum.value();
}

}  // namespace

StepDistribution StepDistribution::kac(int d, double alpha, double L, int R) {
  require(d >= 1 && d <= 3, errc::invalid, "dimension must be 1, 2 or 3");
  require(alpha > 0, errc::invalid, "alpha must be positive");
  require(L >= 1.0, errc::invalid, "L must be >= 1");
  require(R >= 2 * L, errc::invalid, "R must be >= 2L (truncation would distort the plateau)");

  long side = 2L * R + 1;
  double pts = std::pow((double)side, d);
  require(pts <= (double)(1ll << 27), errc::cost_cap, "box too large for dense storage");

  StepDistribution dist;
  dist.d_ = d;
  dist.alpha_ = alpha;
  dist.L_ = L;
  dist.R_ = R;
  dist.w_.resize((std::size_t)pts);

  std::size_t idx = 0;
  if (d == 1) {
    for (long x = -R; x <= R; ++x)
      dist.w_[idx++] = kac_h(std::abs((double)x) / L, d, alpha);
  } else if (d == 2) {
    for (long x = -R; x <= R; ++x) {
      double x2 = (double)x * x;
      for (long y = -R; y <= R; ++y)
        dist.w_[idx++] = kac_h(std::sqrt(x2 + (double)y * y) / L, d, alpha);
    }
  } else {
    for (long x = -R; x <= R; ++x)
      for (long y = -R; y <= R; ++y) {
        double xy2 = (double)x * x + (double)y * y;
        for (long z = -R; z <= R; ++z)
          dist.w_[idx++] = kac_h(std::sqrt(xy2 + (double)z * z) / L, d, alpha);
      }
  }

  double in_box = kac_box_sum(d, alpha, L, R);
  double wide = kac_box_sum(d, alpha, L, 2L * R);
  dist.deficit_ = (wide - in_box) / wide;
  dist.finalize();
  return dist;
}

StepDistribution StepDistribution::nearest_neighbor(int d) {
  require(d >= 1 && d <= 3, errc::invalid, "dimension must be 1, 2 or 3");
  StepDistribution dist;
  dist.d_ = d;
  dist.alpha_ = std::numeric_limits<double>::infinity();
  dist.L_ = 1.0;
  dist.R_ = 1;
  std::size_t pts = 1;
  for (int i = 0; i < d; ++i) pts *= 3;
  dist.w_.assign(pts, 0.0);
  // points at |x| = 1
  int side = 3;
  for (int j = 0; j < d; ++j) {
    std::size_t stride = 1;
    for (int i = j + 1; i < d; ++i) stride *= side;
    std::size_t center = (pts - 1) / 2;
    dist.w_[center + stride] = 1.0 / (2 * d);
    dist.w_[center - stride] = 1.0 / (2 * d);
  }
  dist.deficit_ = 0.0;
  dist.finalize();
  return dist;
}

void StepDistribution::finalize() {
  KahanSum sum;
  for (double w : w_) sum.add(w);
  double norm = sum.value();
  require(norm > 0, errc::internal, "zero total weight");
  for (double& w : w_) w /= norm;

  int side = 2 * R_ + 1;
  marginal_.assign(side, 0.0);
  std::vector<KahanSum> marg(side);
  KahanSum s2, s2a;
  std::vector<int> x(d_);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] == 0.0) continue;
    unflatten(i, x.data());
    double n2 = 0;
    for (int j = 0; j < d_; ++j) n2 += (double)x[j] * x[j];
    s2.add(n2 * w_[i]);
    s2a.add((double)x[0] * x[0] * w_[i]);
    marg[x[0] + R_].add(w_[i]);
  }
  for (int i = 0; i < side; ++i) marginal_[i] = marg[i].value();
  sigma2_ = s2.value();
  sigma2_axis_ = s2a.value();
}

void StepDistribution::unflatten(std::size_t idx, int* x) const {
  int side = 2 * R_ + 1;
  for (int j = d_ - 1; j >= 0; --j) {
    x[j] = (int)(idx % side) - R_;
    idx /= side;
  }
}

double StepDistribution::weight(std::span<const int> x) const {
  require((int)x.size() == d_, errc::invalid, "dimension mismatch");
  std::size_t idx = 0;
  int side = 2 * R_ + 1;
  for (int j = 0; j < d_; ++j) {
    if (x[j] < -R_ || x[j] > R_) return 0.0;
    idx = idx * side + (x[j] + R_);
  }
  return w_[idx];
}

double StepDistribution::fourier(std::span<const double> k) const {
  require((int)k.size() == d_, errc::invalid, "dimension mismatch");
  for (double kj : k)
    require(kj >= -M_PI - 1e-12 && kj <= M_PI + 1e-12, errc::invalid, "k outside [-pi, pi]");
  // Only the first axis carries a nonzero component in most uses; fall back
  // to the marginal when possible.
  bool axis_only = true;
  for (int j = 1; j < d_; ++j)
    if (k[j] != 0.0) axis_only = false;
  if (axis_only) return fourier_axis(k[0]);

  KahanSum sum;
  std::vector<int> x(d_);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] == 0.0) continue;
    unflatten(i, x.data());
    double dot = 0;
    for (int j = 0; j < d_; ++j) dot += k[j] * x[j];
    sum.add(std::cos(dot) * w_[i]);
  }
  return sum.value();
}

double StepDistribution::fourier_axis(double k1) const {
  KahanSum sum;
  for (int i = 0; i < (int)marginal_.size(); ++i) {
    double w = marginal_[i];
    if (w == 0.0) continue;
    sum.add(std::cos(k1 * (i - R_)) * w);
  }
  return sum.value();
}

FourierProfile StepDistribution::fit_small_k(std::span<const double> k_grid) const {
  require(k_grid.size() >= 8, errc::invalid, "need at least 8 grid points");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    require(k_grid[i] > 0, errc::invalid, "k grid must be positive");
    if (i > 0) require(k_grid[i] > k_grid[i - 1], errc::invalid, "k grid must be sorted");
  }
  require(k_grid.back() <= 0.5 / L_ + 1e-12, errc::invalid, "max(k_grid) must be <= 0.5/L");

  FourierProfile prof;
  prof.k.assign(k_grid.begin(), k_grid.end());
  prof.k_min = k_grid.front();
  prof.k_max = k_grid.back();
  bool degenerate = true;
  for (double k : k_grid) {
    double y = 1.0 - fourier_axis(k);
    prof.value.push_back(y);
    if (y >= 1e-14) degenerate = false;
  }
  require(!degenerate, errc::invalid, "grid too close to 0: all values below 1e-14");

  if (alpha_ == 2.0) {
    // 1 - D^(k) = v k^2 log(1/(Lk)); one-parameter least squares.
    prof.log_correction = true;
    double sgy = 0, sgg = 0;
    std::vector<double> g(prof.k.size());
    for (std::size_t i = 0; i < prof.k.size(); ++i) {
      g[i] = prof.k[i] * prof.k[i] * std::log(1.0 / (L_ * prof.k[i]));
      sgy += g[i] * prof.value[i];
      sgg += g[i] * g[i];
    }
    prof.fitted_v = sgy / sgg;
    prof.fitted_exponent = 2.0;
    double ss = 0;
    for (std::size_t i = 0; i < prof.k.size(); ++i) {
      double resid = std::log(prof.value[i]) - std::log(prof.fitted_v * g[i]);
      ss += resid * resid;
    }
    prof.residual_rms = std::sqrt(ss / prof.k.size());
  } else {
    // log(1 - D^(k)) = log v + beta log k
    std::size_t n = prof.k.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double lx = std::log(prof.k[i]);
      double ly = std::log(std::max(prof.value[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double logv = (sy - beta * sx) / n;
    prof.fitted_exponent = beta;
    prof.fitted_v = std::exp(logv);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double resid = std::log(prof.value[i]) - (logv + beta * std::log(prof.k[i]));
      ss += resid * resid;
    }
    prof.residual_rms = std::sqrt(ss / n);
  }
  return prof;
}

void StepDistribution::write_json(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, errc::invalid, "cannot open " + path);
  if (std::isfinite(alpha_))
    std::fprintf(f, "{\"d\":%d,\"alpha\":%.17g,\"L\":%.17g,\"R\":%d,\"deficit\":%.17g,\"weights\":[", d_,
                 alpha_, L_, R_, deficit_);
  else
    std::fprintf(f, "{\"d\":%d,\"alpha\":\"infinity\",\"L\":%.17g,\"R\":%d,\"deficit\":%.17g,\"weights\":[",
                 d_, L_, R_, deficit_);
  std::vector<int> x(d_);
  bool first = true;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] == 0.0) continue;
    unflatten(i, x.data());
    std::fprintf(f, "%s[[", first ? "" : ",");
    first = false;
    for (int j = 0; j < d_; ++j) std::fprintf(f, "%s%d", j ? "," : "", x[j]);
    std::fprintf(f, "],%.17g]", w_[i]);
  }
  std::fprintf(f, "]}\n");
  std::fclose(f);
}

}  // namespace gyra
