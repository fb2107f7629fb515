// Independent numerical oracles used by the test suites.  These deliberately
// avoid the library's own code paths: plain quadrature, series tails, and
// brute-force enumeration.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Composite Simpson rule; n subintervals (rounded up to even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// int_z^inf cos(w) w^{-s} dw by repeated integration by parts (z large).
inline double cos_tail(double z, double s) {
  double sinz = std::sin(z), cosz = std::cos(z);
  double result = 0.0, coeff = 1.0, zp = std::pow(z, -s), sk = s;
  for (int i = 0; i < 14; ++i) {
    result += coeff * (-sinz * zp + sk * cosz * zp / z);
    double nxt = std::abs(coeff * sk * (sk + 1.0) * zp / (z * z));
    if (nxt < 1e-18) break;
    coeff *= -sk * (sk + 1.0);
    zp /= z * z;
    sk += 2.0;
  }
  return result;
}

// K_q = int_0^inf (1 - cos u) u^{-1-q} du, q in (0, 2), by quadrature.
// Geometric subdivision keeps the relative Simpson error uniform along the
// u^{-1-q} envelope.
inline double kq_quadrature(double q) {
  double a = 0.05, b = 80.0;
  double head = 0.0, fact = 2.0, sign = 1.0;
  for (int k = 1; k <= 5; ++k) {
    head += sign * std::pow(a, 2.0 * k - q) / (fact * (2.0 * k - q));
    sign = -sign;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  double mid = 0.0, lo = a;
  while (lo < b) {
    double hi = std::min(lo * 1.05, b);
    mid += simpson([q](double u) { return (1.0 - std::cos(u)) * std::pow(u, -1.0 - q); }, lo, hi,
                   128);
    lo = hi;
  }
  double tail = std::pow(b, -q) / q - cos_tail(b, 1.0 + q);
  return head + mid + tail;
}

// r-th absolute moment of the symmetric alpha-stable law with
// characteristic function exp(-c |k|^alpha), via the cosine-moment
// integral E|X|^r = (1/K_r) int_0^inf (1 - e^{-c u^alpha}) u^{-1-r} du.
inline double stable_abs_moment(double r, double alpha, double c) {
  double a = std::pow(1e-5 / c, 1.0 / alpha);
  double b = std::pow(45.0 / c, 1.0 / alpha);
  double head = c * std::pow(a, alpha - r) / (alpha - r) -
                c * c * std::pow(a, 2.0 * alpha - r) / (2.0 * (2.0 * alpha - r));
  // geometric subdivision: the integrand spans many decades
  double integral = head;
  double lo = a;
  while (lo < b) {
    double hi = std::min(lo * 1.12, b);
    integral += simpson(
        [&](double u) { return (1.0 - std::exp(-c * std::pow(u, alpha))) * std::pow(u, -1.0 - r); },
        lo, hi, 64);
    lo = hi;
  }
  double tail = std::pow(b, -r) / r;
  return (integral + tail) / kq_quadrature(r);
}

// E|N(0, variance)|^r by quadrature against the Gaussian density.  The
// substitution x = y^2 removes the |x|^r endpoint singularity.
inline double gaussian_abs_moment(double r, double variance) {
  double sd = std::sqrt(variance);
  return simpson(
      [&](double y) {
        double x = y * y;
        return 4.0 * y * std::pow(x, r) * std::exp(-x * x / (2.0 * variance)) /
               std::sqrt(2.0 * M_PI * variance);
      },
      0.0, std::sqrt(14.0 * sd), 200000);
}

// Brute-force self-avoiding walk enumeration on Z^d with pairwise
// intersection checks (no visited set): weighted endpoint sums.
struct SawPaths {
  // counts[t] = number of SAWs of length t; endpoint_weight maps packed
  // endpoints to summed step-weight products at the final length.
  std::vector<long long> counts;
};

inline void saw_paths_recurse(std::vector<std::vector<int>>& walk, int T, int d,
                              const std::vector<std::vector<int>>& steps,
                              std::vector<long long>& counts) {
  int t = (int)walk.size() - 1;
  counts[t]++;
  if (t == T) return;
  for (const auto& s : steps) {
    std::vector<int> nxt(d);
    for (int j = 0; j < d; ++j) nxt[j] = walk.back()[j] + s[j];
    bool hit = false;
    for (const auto& p : walk)
      if (p == nxt) {
        hit = true;
        break;
      }
    if (hit) continue;
    walk.push_back(nxt);
    saw_paths_recurse(walk, T, d, steps, counts);
    walk.pop_back();
  }
}

// Nearest-neighbor SAW counts c_0..c_T by pairwise-check enumeration.
inline std::vector<long long> saw_counts_nn(int d, int T) {
  std::vector<std::vector<int>> steps;
  for (int j = 0; j < d; ++j)
    for (int sgn : {-1, 1}) {
      std::vector<int> s(d, 0);
      s[j] = sgn;
      steps.push_back(s);
    }
  std::vector<long long> counts(T + 1, 0);
  std::vector<std::vector<int>> walk{std::vector<int>(d, 0)};
  saw_paths_recurse(walk, T, d, steps, counts);
  return counts;
}

}  // namespace oracle
