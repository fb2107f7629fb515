#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gyra/common.hpp"
#include "gyra/stepdist.hpp"

namespace gyra {

enum class Axis { first_coordinate, euclidean };

// Nonnegative function on the truncated box [-B, B]^d at a fixed time index.
// Dense storage for small boxes, hashed sparse storage otherwise (Monte
// Carlo endpoints, d >= 3 enumerations).
class Field {
 public:
  static Field delta(int d, int B, bool dense = true);
  static Field zeros_like(const Field& f);

  int dimension() const { return d_; }
  int box_radius() const { return B_; }
  int time_index() const { return t_; }
  void set_time_index(int t) { t_ = t; }
  bool is_dense() const { return dense_; }

  double at(std::span<const int> x) const;
  void add(std::span<const int> x, double w);  // out-of-box mass goes to escaped

  double total() const;  // compensated sum of in-box values
  double escaped() const { return escaped_; }
  void add_escaped(double m) { escaped_ += m; }

  std::size_t nonzero_count() const;

  // Visit nonzero entries as (coords, value); dense iteration is in
  // lexicographic point order, sparse iteration in sorted key order.
  template <class F>
  void for_each(F&& fn) const;

  // Marginal over the first coordinate, indexed by x1 + B.
  std::vector<double> axis_marginal() const;

  void scale(double factor);

  friend Field convolve(const Field& f, const StepDistribution& D);
  friend Field convolve_fields(const Field& a, const Field& b);

 private:
  Field() = default;
  static std::int64_t pack(std::span<const int> x);
  static void unpack(std::int64_t key, int d, int* x);
  std::size_t flat_index(std::span<const int> x) const;  // dense only; caller checks bounds

  int d_ = 1;
  int B_ = 0;
  int t_ = 0;
  bool dense_ = true;
  std::vector<double> v_;
  std::unordered_map<std::int64_t, double> s_;
  double escaped_ = 0.0;
};

// g(x) = sum_y D(y) f(x - y); mass pushed outside the box accumulates in
// escaped_mass; time index is incremented.
Field convolve(const Field& f, const StepDistribution& D);

// Field-field convolution on the box of a (lace-expansion algebra).
Field convolve_fields(const Field& a, const Field& b);

// (sum |x1|^r f, sum f) or the euclidean-norm analogue.
struct Moment {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio() const { return numerator / denominator; }
};
Moment absolute_moment(const Field& f, double r, Axis axis = Axis::first_coordinate);

// (sum |x|^r f / sum f)^{1/r}
double gyration_radius(const Field& f, double r);

// Fractional moment sum |x1|^q f(x) via the cosine integral representation
// (1/K_q) int_0^inf (sum f - sum cos(u x1) f) u^{-1-q} du, truncated at
// u_max with an analytic tail.
double fractional_moment_via_integral(const Field& f, double q,
                                      double u_max = std::numbers::pi, int n_quad = 256);

struct MomentSeries {
  double r = 0.0;
  Axis axis = Axis::first_coordinate;
  struct Entry {
    int t;
    double numerator;
    double denominator;
    double ratio;
  };
  std::vector<Entry> entries;
};

void write_field_csv(const Field& f, const std::string& path);
void write_moment_series_csv(const MomentSeries& s, const std::string& path);

template <class F>
void Field::for_each(F&& fn) const {
  if (dense_) {
    int x[3];
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (v_[i] == 0.0) continue;
      std::size_t idx = i;
      int side = 2 * B_ + 1;
      for (int j = d_ - 1; j >= 0; --j) {
        x[j] = (int)(idx % side) - B_;
        idx /= side;
      }
      fn(std::span<const int>(x, d_), v_[i]);
    }
  } else {
    std::vector<std::int64_t> keys;
    keys.reserve(s_.size());
    for (const auto& [k, v] : s_)
      if (v != 0.0) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    int x[3];
    for (std::int64_t k : keys) {
      unpack(k, d_, x);
      fn(std::span<const int>(x, d_), s_.at(k));
    }
  }
}

}  // namespace gyra
