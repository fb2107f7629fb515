#include "gyra/theory.hpp"

#include <cmath>

namespace gyra {
namespace theory {

double universal_amplitude(double r, double alpha) {
  require(r > 0, errc::invalid, "r must be positive");
  require(r < alpha, errc::invalid, "r must be below alpha");
  if (alpha >= 2.0) return std::tgamma(r + 1.0) / std::tgamma(r / 2.0 + 1.0);
  double sine_ratio = 2.0 * std::sin(r * M_PI / 2.0) / (alpha * std::sin(r * M_PI / alpha));
  return sine_ratio * std::tgamma(r + 1.0) / std::tgamma(r / alpha + 1.0);
}

double K_q(double q) {
  require(q > 0 && q < 2, errc::invalid, "q must lie in (0, 2)");
  return M_PI / (2.0 * std::sin(q * M_PI / 2.0) * std::tgamma(q + 1.0));
}

double upper_critical_dimension(double alpha) {
  require(alpha > 0, errc::invalid, "alpha must be positive");
  return 2.0 * std::min(alpha, 2.0);
}

std::uint64_t binomial_expansion_coefficient(unsigned j, unsigned t) {
  if (t < j) return 0;
  // binom(t, j), exact in 64 bits for the series ranges used here
  unsigned k = std::min(j, t - j);
  std::uint64_t result = 1;
  for (unsigned i = 1; i <= k; ++i) {
    std::uint64_t num = t - k + i;
    // keep intermediate values exact: result * num is divisible by i
    __uint128_t wide = (__uint128_t)result * num;
    require(wide / i <= UINT64_MAX, errc::invalid, "binomial coefficient overflows 64 bits");
    result = (std::uint64_t)(wide / i);
  }
  return result;
}

}  // namespace theory

double TheoryPrediction::predict(long t) const {
  double A = amplitude();
  double chi = std::min(alpha, 2.0);
  if (alpha == 2.0) {
    require(t >= 2, errc::invalid, "t must be >= 2 when alpha = 2");
    return A * std::pow(C * v * t * std::log(std::sqrt((double)t)), r / 2.0);
  }
  return A * std::pow(C * v * t, r / chi);
}

}  // namespace gyra
