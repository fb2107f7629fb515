#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gyra/theory.hpp"
#include "oracles.hpp"

using namespace gyra;

TEST_CASE("K_q against direct quadrature") {
  for (double q : {0.3, 0.5, 0.9, 1.2, 1.7}) {
    CHECK(theory::K_q(q) == doctest::Approx(oracle::kq_quadrature(q)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(theory::K_q(2.0), error);
  CHECK_THROWS_AS(theory::K_q(0.0), error);
}

TEST_CASE("amplitude, alpha >= 2: Gamma ratio and gaussian moments") {
  // A(r, alpha) reduces to Gamma(r+1)/Gamma(r/2+1) for alpha >= 2
  for (double alpha : {2.0, 2.5, 3.0, 10.0}) {
    for (double r : {0.5, 1.0, 1.5}) {
      double expected = std::tgamma(r + 1.0) / std::tgamma(r / 2.0 + 1.0);
      CHECK(theory::universal_amplitude(r, alpha) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  // E|N(0, 2vt)|^r = A(r, alpha) (vt)^{r/2} for alpha > 2; take v t = 1
  for (double r : {0.6, 1.0, 1.4, 1.9}) {
    double lhs = oracle::gaussian_abs_moment(r, 2.0);
    CHECK(theory::universal_amplitude(r, 3.0) == doctest::Approx(lhs).epsilon(1e-6));
  }
  // even integer r = 2: E X^2 = 2vt, A(2, alpha) = 2
  CHECK(theory::universal_amplitude(2.0, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("amplitude, alpha < 2: matches stable-law absolute moments") {
  // E|X|^r = A(r, alpha) (vt)^{r/alpha} for X stable with char. fn
  // exp(-vt |k|^alpha); compare against the independent quadrature oracle.
  struct Case {
    double r, alpha, c;
  } cases[] = {{0.4, 0.8, 1.0}, {0.4, 0.8, 2.5}, {0.7, 1.5, 1.0}, {1.2, 1.5, 0.7}, {0.25, 0.5, 1.0}};
  for (const auto& cs : cases) {
    double pred = theory::universal_amplitude(cs.r, cs.alpha) * std::pow(cs.c, cs.r / cs.alpha);
    double orc = oracle::stable_abs_moment(cs.r, cs.alpha, cs.c);
    CHECK(pred == doctest::Approx(orc).epsilon(1e-4));
  }
}

TEST_CASE("amplitude spot value") {
  // hand-computed A(0.4, 0.8)
  double r = 0.4, alpha = 0.8;
  double byhand = 2.0 * std::sin(r * M_PI / 2.0) / (alpha * std::sin(r * M_PI / alpha)) *
                  std::tgamma(r + 1.0) / std::tgamma(r / alpha + 1.0);
  CHECK(theory::universal_amplitude(r, alpha) == doctest::Approx(byhand).epsilon(1e-14));
  CHECK(theory::universal_amplitude(r, alpha) == doctest::Approx(1.4711).epsilon(1e-3));
}

TEST_CASE("amplitude domain checks") {
  CHECK_THROWS_AS(theory::universal_amplitude(0.9, 0.8), error);  // r >= alpha < 2
  CHECK_THROWS_AS(theory::universal_amplitude(0.0, 1.5), error);
  CHECK_THROWS_AS(theory::universal_amplitude(-0.5, 3.0), error);
}

TEST_CASE("upper critical dimension") {
  CHECK(theory::upper_critical_dimension(0.5) == doctest::Approx(1.0));
  CHECK(theory::upper_critical_dimension(2.0) == doctest::Approx(4.0));
  CHECK(theory::upper_critical_dimension(3.5) == doctest::Approx(4.0));
}

TEST_CASE("binomial expansion coefficients") {
  // m^j/(1-m)^{j+1} = sum_t binom(t, j) m^t
  CHECK(theory::binomial_expansion_coefficient(0, 0) == 1);
  CHECK(theory::binomial_expansion_coefficient(0, 7) == 1);
  CHECK(theory::binomial_expansion_coefficient(2, 1) == 0);
  CHECK(theory::binomial_expansion_coefficient(2, 5) == 10);
  CHECK(theory::binomial_expansion_coefficient(3, 10) == 120);
  CHECK(theory::binomial_expansion_coefficient(5, 60) == 5461512ull);
}

TEST_CASE("prediction evaluation") {
  TheoryPrediction pred{.r = 1.0, .alpha = 3.0, .C = 1.0, .v = 0.5};
  double t = 100;
  CHECK(pred.predict(100) ==
        doctest::Approx(pred.amplitude() * std::pow(0.5 * t, 0.5)).epsilon(1e-13));

  TheoryPrediction pred2{.r = 0.4, .alpha = 0.8, .C = 2.0, .v = 0.3};
  CHECK(pred2.predict(50) ==
        doctest::Approx(pred2.amplitude() * std::pow(2.0 * 0.3 * 50, 0.5)).epsilon(1e-13));

  TheoryPrediction predlog{.r = 1.0, .alpha = 2.0, .C = 1.0, .v = 0.5};
  double tt = 64;
  CHECK(predlog.predict(64) ==
        doctest::Approx(predlog.amplitude() * std::sqrt(0.5 * tt * std::log(std::sqrt(tt))))
            .epsilon(1e-13));
}
