#pragma once

#include <cstdint>

#include "gyra/common.hpp"

namespace gyra {
namespace theory {

// Prefactor of the sharp moment-ratio asymptotics:
//   2 sin(r pi / (alpha v 2)) / ((alpha ^ 2) sin(r pi / alpha))
//     * Gamma(r+1) / Gamma(r/(alpha ^ 2) + 1).
// For alpha >= 2 the sine ratio is identically 1, which also absorbs the
// even-integer r case.
double universal_amplitude(double r, double alpha);

// K_q = int_0^inf (1 - cos u) u^{-1-q} du = pi / (2 sin(q pi / 2) Gamma(q+1)).
double K_q(double q);

// Upper critical dimension 2 (alpha ^ 2).
double upper_critical_dimension(double alpha);

// Coefficient of m^t in m^j / (1-m)^{j+1}: binom(t, j) for t >= j, else 0.
std::uint64_t binomial_expansion_coefficient(unsigned j, unsigned t);

}  // namespace theory

// Model constants feeding the moment-ratio prediction.
struct TheoryPrediction {
  double r = 0.0;
  double alpha = 0.0;
  double C = 1.0;  // model constant (1 for random walk)
  double v = 0.0;  // small-k amplitude v_alpha

  double amplitude() const { return theory::universal_amplitude(r, alpha); }
  double d_c() const { return theory::upper_critical_dimension(alpha); }
  // A(r, alpha) (C v t)^{r/(alpha^2)}, with the extra log sqrt(t) factor at
  // alpha = 2.
  double predict(long t) const;
};

}  // namespace gyra
