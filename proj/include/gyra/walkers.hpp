#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gyra/field.hpp"
#include "gyra/stepdist.hpp"

namespace gyra {

enum class Model { rw, saw_exact, saw_mc, op_mc, op_exact };

// Per-t Monte Carlo bookkeeping: surviving counts and batched moment sums
// for the configured moment orders.
struct McMeta {
  long long n_trials = 0;
  std::uint64_t seed = 0;
  int n_batches = 32;
  std::vector<double> r_list;
  Axis axis = Axis::first_coordinate;
  std::vector<long long> surviving;                      // per t
  std::vector<std::vector<long long>> batch_count;       // [t][batch]
  std::vector<std::vector<std::vector<double>>> batch_sum;  // [r][t][batch]

  // ratio estimate and standard error for r_list[r_index] at time t;
  // returns false when fewer than 100 trials survive (t marked unusable).
  bool moment_ratio(int r_index, int t, double* ratio, double* stderr_out) const;
};

struct EvolutionRun {
  Model model = Model::rw;
  int d = 1;
  int T = 0;
  double p = 0.0;  // oriented percolation only
  std::vector<Field> fields;  // indexed by t = 0..T (may be empty for streaming runs)
  std::optional<McMeta> mc;
};

// Exact random-walk evolution by repeated convolution.  Aborts (budget
// error) when the escaped mass exceeds escape_tol at any t.
EvolutionRun evolve_rw(const StepDistribution& D, int T, int B, double escape_tol = 1e-6);

// Streaming variant: keeps only the current field and returns moment
// series for each requested order.
std::vector<MomentSeries> evolve_rw_series(const StepDistribution& D, int T, int B,
                                           const std::vector<double>& r_list, Axis axis,
                                           double escape_tol = 1e-6,
                                           std::vector<double>* totals = nullptr);

// Exact SAW 2-point functions by depth-first enumeration with backtracking.
// Refuses when the estimated node count exceeds node_budget.
EvolutionRun enumerate_saw(const StepDistribution& D, int T, double node_budget = 1e9);

// Simple-sampling SAW Monte Carlo: random-walk paths drawn from D,
// self-intersecting prefixes discarded.
EvolutionRun sample_saw_mc(const StepDistribution& D, int T, long long n_trials,
                           std::uint64_t seed, const std::vector<double>& r_list,
                           Axis axis = Axis::first_coordinate, bool store_fields = true);

struct OPConfig {
  double p = 0.0;
  int T = 0;
  long long n_trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> r_list;
  Axis axis = Axis::euclidean;
  bool store_fields = false;
  long long active_budget = 50'000'000;  // per-trial active-set size cap
};

// Oriented-percolation cluster growth: per trial the reached set at each
// time slice, children sampled exactly from the independent-bond law.
EvolutionRun simulate_op(const StepDistribution& D, const OPConfig& cfg);

// Exact small-T OP 2-point functions by evolving the distribution over
// active sets (feasible for tiny windows only; used for lace inversion).
EvolutionRun op_exact_small_t(const StepDistribution& D, double p, int T);

}  // namespace gyra
