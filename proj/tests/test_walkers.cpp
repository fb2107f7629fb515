#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gyra/walkers.hpp"
#include "oracles.hpp"

using namespace gyra;

TEST_CASE("nearest-neighbor random walk: exact binomial moment ratios") {
  auto D = StepDistribution::nearest_neighbor(1);
  auto run = evolve_rw(D, 12, 16);
  REQUIRE(run.fields.size() == 13);
  for (int t = 1; t <= 12; ++t) {
    auto m2 = absolute_moment(run.fields[t], 2.0);
    auto m4 = absolute_moment(run.fields[t], 4.0);
    CHECK(m2.ratio() == doctest::Approx((double)t).epsilon(1e-13));
    CHECK(m4.ratio() == doctest::Approx(3.0 * t * t - 2.0 * t).epsilon(1e-13));
    CHECK(m2.denominator == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("streaming series agrees with stored fields") {
  auto D = StepDistribution::kac(1, 1.5, 1.0, 10);
  auto run = evolve_rw(D, 8, 100);
  std::vector<double> totals;
  auto series =
      evolve_rw_series(D, 8, 100, {2.0, 0.7}, Axis::first_coordinate, 1e-6, &totals);
  REQUIRE(series.size() == 2);
  REQUIRE(series[0].entries.size() == 9);  // t = 0..8
  for (const auto& e : series[0].entries) {
    if (e.t == 0) continue;
    auto m = absolute_moment(run.fields[e.t], 2.0);
    CHECK(e.ratio == doctest::Approx(m.ratio()).epsilon(1e-13));
  }
  for (const auto& e : series[1].entries) {
    if (e.t == 0) continue;
    auto m = absolute_moment(run.fields[e.t], 0.7);
    CHECK(e.ratio == doctest::Approx(m.ratio()).epsilon(1e-13));
  }
  CHECK(totals.size() == 9);
}

TEST_CASE("random walk escape budget triggers") {
  auto D = StepDistribution::nearest_neighbor(1);
  CHECK_THROWS_AS(evolve_rw(D, 30, 4), error);
  try {
    evolve_rw(D, 30, 4);
  } catch (const error& e) {
    CHECK(e.code() == errc::budget);
  }
}

TEST_CASE("exact SAW enumeration matches brute-force pairwise counts") {
  for (int d : {1, 2}) {
    auto D = StepDistribution::nearest_neighbor(d);
    int T = d == 1 ? 6 : 5;
    auto run = enumerate_saw(D, T);
    auto counts = oracle::saw_counts_nn(d, T);
    REQUIRE((int)run.fields.size() == T + 1);
    for (int t = 0; t <= T; ++t) {
      double expected = (double)counts[t] / std::pow(2.0 * d, t);
      CHECK(run.fields[t].total() == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("SAW enumeration with a spread-out law stays a probability-weighted count") {
  // the Kac law carries mass at the origin, so a zero-displacement "step"
  // counts as an immediate self-intersection
  auto D = StepDistribution::kac(1, 1.5, 1.0, 2);
  auto run = enumerate_saw(D, 4);
  int o[1] = {0};
  double d0 = D.weight(o);
  CHECK(run.fields[1].total() == doctest::Approx(1.0 - d0).epsilon(1e-13));
  // walks o -> a -> b with a != o, b notin {o, a}
  double t2 = 0;
  for (int a = -2; a <= 2; ++a) {
    if (a == 0) continue;
    int av[1] = {a}, ma[1] = {-a};
    t2 += D.weight(av) * (1.0 - d0 - D.weight(ma));
  }
  CHECK(run.fields[2].total() == doctest::Approx(t2).epsilon(1e-13));
}

TEST_CASE("SAW cost cap refusal") {
  auto D = StepDistribution::nearest_neighbor(3);
  CHECK_THROWS_AS(enumerate_saw(D, 20, /*node_budget=*/1e3), error);
  try {
    enumerate_saw(D, 20, 1e3);
  } catch (const error& e) {
    CHECK(e.code() == errc::cost_cap);
  }
}

TEST_CASE("SAW Monte Carlo is unbiased against exact enumeration") {
  auto D = StepDistribution::nearest_neighbor(2);
  int T = 5;
  auto exact = enumerate_saw(D, T);
  auto mc = sample_saw_mc(D, T, 200000, 1234, {2.0});
  REQUIRE(mc.mc.has_value());
  for (int t = 2; t <= T; ++t) {
    auto me = absolute_moment(exact.fields[t], 2.0);
    double ratio, se;
    REQUIRE(mc.mc->moment_ratio(0, t, &ratio, &se));
    CHECK(se > 0);
    CHECK(std::abs(ratio - me.ratio()) < 5.0 * se + 1e-12);
    // survival fraction matches c_t / (2d)^t
    double surv = (double)mc.mc->surviving[t] / mc.mc->n_trials;
    double expect = exact.fields[t].total();
    CHECK(surv == doctest::Approx(expect).epsilon(0.05));
  }
}

TEST_CASE("SAW Monte Carlo determinism") {
  auto D = StepDistribution::nearest_neighbor(1);
  auto a = sample_saw_mc(D, 4, 5000, 99, {2.0});
  auto b = sample_saw_mc(D, 4, 5000, 99, {2.0});
  for (int t = 0; t <= 4; ++t) CHECK(a.mc->surviving[t] == b.mc->surviving[t]);
  double ra, sa, rb, sb;
  if (a.mc->moment_ratio(0, 3, &ra, &sa)) {
    REQUIRE(b.mc->moment_ratio(0, 3, &rb, &sb));
    CHECK(ra == rb);
    CHECK(sa == sb);
  }
}

TEST_CASE("exact oriented percolation small-t values") {
  auto D = StepDistribution::nearest_neighbor(1);
  double p = 0.6, q = p / 2.0;
  auto run = op_exact_small_t(D, p, 2);
  REQUIRE(run.fields.size() == 3);
  int z[1] = {0}, p1[1] = {1}, m1[1] = {-1}, p2[1] = {2};
  CHECK(run.fields[0].at(z) == doctest::Approx(1.0));
  CHECK(run.fields[1].at(p1) == doctest::Approx(q).epsilon(1e-14));
  CHECK(run.fields[1].at(m1) == doctest::Approx(q).epsilon(1e-14));
  CHECK(run.fields[1].at(z) == doctest::Approx(0.0));
  // phi_2(2): +1 active at time 1 and the +1 -> +2 bond open
  CHECK(run.fields[2].at(p2) == doctest::Approx(q * q).epsilon(1e-14));
  // phi_2(0) = p^2/2 - p^4/16 (inclusion-exclusion over the two parents)
  CHECK(run.fields[2].at(z) ==
        doctest::Approx(p * p / 2.0 - std::pow(p, 4) / 16.0).epsilon(1e-14));
}

TEST_CASE("OP Monte Carlo agrees with the exact distribution") {
  auto D = StepDistribution::nearest_neighbor(1);
  double p = 0.7;
  auto exact = op_exact_small_t(D, p, 3);
  OPConfig cfg;
  cfg.p = p;
  cfg.T = 3;
  cfg.n_trials = 200000;
  cfg.seed = 42;
  cfg.r_list = {2.0};
  auto mc = simulate_op(D, cfg);
  REQUIRE(mc.mc.has_value());
  for (int t = 1; t <= 3; ++t) {
    // two-point totals: E[#reached at t]
    auto me = absolute_moment(exact.fields[t], 2.0, Axis::euclidean);
    double ratio, se;
    REQUIRE(mc.mc->moment_ratio(0, t, &ratio, &se));
    double exact_ratio = me.ratio();
    CHECK(std::abs(ratio - exact_ratio) < 5.0 * se + 1e-12);
  }
}

TEST_CASE("OP Monte Carlo determinism and validation") {
  auto D = StepDistribution::nearest_neighbor(1);
  OPConfig cfg;
  cfg.p = 0.5;
  cfg.T = 4;
  cfg.n_trials = 3000;
  cfg.seed = 7;
  cfg.r_list = {2.0};
  auto a = simulate_op(D, cfg);
  auto b = simulate_op(D, cfg);
  for (int t = 0; t <= 4; ++t) CHECK(a.mc->surviving[t] == b.mc->surviving[t]);

  cfg.p = 2.5;  // p max_x D(x) >= 1: bond probabilities invalid
  CHECK_THROWS_AS(simulate_op(D, cfg), error);
}

TEST_CASE("moment_ratio refuses thin samples") {
  McMeta meta;
  meta.n_trials = 50;
  meta.r_list = {2.0};
  meta.surviving.assign(3, 50);
  meta.surviving[2] = 20;
  meta.batch_count.assign(3, std::vector<long long>(32, 2));
  meta.batch_sum.assign(1, std::vector<std::vector<double>>(3, std::vector<double>(32, 1.0)));
  double ratio, se;
  CHECK(!meta.moment_ratio(0, 2, &ratio, &se));
}
