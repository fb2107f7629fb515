#include "gyra/walkers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include "gyra/rng.hpp"

namespace gyra {

namespace {

struct SupportPoint {
  std::array<int, 3> x{0, 0, 0};
  double w = 0.0;
};

std::vector<SupportPoint> support_of(const StepDistribution& D) {
  std::vector<SupportPoint> sup;
  std::vector<int> x(D.dimension());
  for (std::size_t i = 0; i < D.point_count(); ++i) {
    double w = D.weights()[i];
    if (w == 0.0) continue;
    D.unflatten(i, x.data());
    SupportPoint p;
    p.w = w;
    for (int j = 0; j < D.dimension(); ++j) p.x[j] = x[j];
    sup.push_back(p);
  }
  return sup;
}

int support_reach(const std::vector<SupportPoint>& sup, int d) {
  int reach = 0;
  for (const auto& p : sup)
    for (int j = 0; j < d; ++j) reach = std::max(reach, std::abs(p.x[j]));
  return reach;
}

std::int64_t pack_coords(const int* x, int d) {
  std::int64_t key = 0;
  for (int j = 0; j < d; ++j) key = (key << 21) | (std::int64_t)(x[j] + (1 << 20));
  return key;
}

void unpack_coords(std::int64_t key, int d, int* x) {
  for (int j = d - 1; j >= 0; --j) {
    x[j] = (int)(key & ((1 << 21) - 1)) - (1 << 20);
    key >>= 21;
  }
}

double moment_weight(const int* x, int d, double r, Axis axis) {
  if (axis == Axis::first_coordinate) {
    if (x[0] == 0) return 0.0;
    return std::pow(std::abs((double)x[0]), r);
  }
  double n2 = 0;
  for (int j = 0; j < d; ++j) n2 += (double)x[j] * x[j];
  return n2 > 0 ? std::pow(n2, 0.5 * r) : 0.0;
}

}  // namespace

bool McMeta::moment_ratio(int r_index, int t, double* ratio, double* stderr_out) const {
  if (surviving[t] < 100) return false;
  KahanSum num, den;
  std::vector<double> batch_ratio;
  for (int b = 0; b < n_batches; ++b) {
    long long c = batch_count[t][b];
    double s = batch_sum[r_index][t][b];
    num.add(s);
    den.add((double)c);
    if (c > 0) batch_ratio.push_back(s / c);
  }
  *ratio = num.value() / den.value();
  double mean = 0;
  for (double v : batch_ratio) mean += v;
  mean /= batch_ratio.size();
  double var = 0;
  for (double v : batch_ratio) var += (v - mean) * (v - mean);
  std::size_t nb = batch_ratio.size();
  *stderr_out = nb > 1 ? std::sqrt(var / (nb * (nb - 1))) : 0.0;
  return true;
}

EvolutionRun evolve_rw(const StepDistribution& D, int T, int B, double escape_tol) {
  require(T >= 0, errc::invalid, "horizon must be nonnegative");
  require(B >= D.truncation_radius(), errc::invalid, "box must cover the kernel support");
  EvolutionRun run;
  run.model = Model::rw;
  run.d = D.dimension();
  run.T = T;
  run.fields.push_back(Field::delta(D.dimension(), B));
  for (int t = 1; t <= T; ++t) {
    run.fields.push_back(convolve(run.fields.back(), D));
    if (run.fields.back().escaped() > escape_tol)
      fail(errc::budget, "escaped mass " + std::to_string(run.fields.back().escaped()) +
                             " exceeds tolerance at t = " + std::to_string(t));
  }
  return run;
}

std::vector<MomentSeries> evolve_rw_series(const StepDistribution& D, int T, int B,
                                           const std::vector<double>& r_list, Axis axis,
                                           double escape_tol, std::vector<double>* totals) {
  require(T >= 0, errc::invalid, "horizon must be nonnegative");
  require(B >= D.truncation_radius(), errc::invalid, "box must cover the kernel support");
  std::vector<MomentSeries> out(r_list.size());
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    out[i].r = r_list[i];
    out[i].axis = axis;
  }
  Field cur = Field::delta(D.dimension(), B);
  for (int t = 0; t <= T; ++t) {
    if (t > 0) {
      cur = convolve(cur, D);
      if (cur.escaped() > escape_tol)
        fail(errc::budget, "escaped mass " + std::to_string(cur.escaped()) +
                               " exceeds tolerance at t = " + std::to_string(t));
    }
    if (totals) totals->push_back(cur.total());
    for (std::size_t i = 0; i < r_list.size(); ++i) {
      Moment m = absolute_moment(cur, r_list[i], axis);
      out[i].entries.push_back({t, m.numerator, m.denominator, m.ratio()});
    }
  }
  return out;
}

namespace {

struct SawEnumerator {
  int d;
  int T;
  int B;
  std::vector<SupportPoint> sup;
  std::vector<char> visited;
  std::vector<Field>* fields;
  long long nodes = 0;

  std::size_t visit_index(const int* x) const {
    std::size_t idx = 0;
    int side = 2 * B + 1;
    for (int j = 0; j < d; ++j) idx = idx * side + (x[j] + B);
    return idx;
  }

  void dfs(int* x, int t, double w) {
    ++nodes;
    (*fields)[t].add(std::span<const int>(x, d), w);
    if (t == T) return;
    std::size_t self = visit_index(x);
    visited[self] = 1;
    int nx[3];
    for (const auto& p : sup) {
      for (int j = 0; j < d; ++j) nx[j] = x[j] + p.x[j];
      if (visited[visit_index(nx)]) continue;
      dfs(nx, t + 1, w * p.w);
    }
    visited[self] = 0;
  }
};

}  // namespace

EvolutionRun enumerate_saw(const StepDistribution& D, int T, double node_budget) {
  require(T >= 0, errc::invalid, "horizon must be nonnegative");
  auto sup = support_of(D);
  double s = (double)sup.size();
  double estimate = 1;
  double level = 1;
  for (int t = 1; t <= T; ++t) {
    level *= (t == 1) ? s : (s - 1);
    estimate += level;
  }
  require(estimate <= node_budget, errc::cost_cap,
          "estimated " + std::to_string(estimate) + " enumeration nodes exceeds budget of " +
              std::to_string(node_budget));

  int d = D.dimension();
  int B = std::max(1, T * support_reach(sup, d));
  EvolutionRun run;
  run.model = Model::saw_exact;
  run.d = d;
  run.T = T;
  for (int t = 0; t <= T; ++t) {
    Field f = Field::delta(d, B);
    f.set_time_index(t);
    if (t > 0) f.scale(0.0);
    run.fields.push_back(std::move(f));
  }
  SawEnumerator en;
  en.d = d;
  en.T = T;
  en.B = B;
  en.sup = sup;
  en.fields = &run.fields;
  en.visited.assign((std::size_t)std::pow(2.0 * B + 1.0, d), 0);
  int origin[3] = {0, 0, 0};
  // fields[0] already holds the delta; dfs re-adds it, so clear first
  run.fields[0].scale(0.0);
  en.dfs(origin, 0, 1.0);
  return run;
}

EvolutionRun sample_saw_mc(const StepDistribution& D, int T, long long n_trials,
                           std::uint64_t seed, const std::vector<double>& r_list, Axis axis,
                           bool store_fields) {
  require(n_trials >= 1000, errc::invalid, "need at least 1000 trials");
  require(T >= 0, errc::invalid, "horizon must be nonnegative");
  auto sup = support_of(D);
  int d = D.dimension();
  int B = std::max(1, T * support_reach(sup, d));
  require(B < (1 << 20), errc::invalid, "walk range too large for packed coordinates");

  // cumulative table for inversion sampling, fixed lexicographic order
  std::vector<double> cum(sup.size());
  double acc = 0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    acc += sup[i].w;
    cum[i] = acc;
  }
  cum.back() = 1.0;

  EvolutionRun run;
  run.model = Model::saw_mc;
  run.d = d;
  run.T = T;
  McMeta meta;
  meta.n_trials = n_trials;
  meta.seed = seed;
  meta.r_list = r_list;
  meta.axis = axis;
  meta.surviving.assign(T + 1, 0);
  meta.batch_count.assign(T + 1, std::vector<long long>(meta.n_batches, 0));
  meta.batch_sum.assign(r_list.size(),
                        std::vector<std::vector<double>>(T + 1, std::vector<double>(meta.n_batches, 0.0)));

  std::vector<std::unordered_map<std::int64_t, double>> counts(T + 1);
  std::unordered_set<std::int64_t> visited;
  visited.reserve(2 * T);

  for (long long trial = 0; trial < n_trials; ++trial) {
    Rng rng(seed, (std::uint64_t)trial);
    int b = (int)(trial * meta.n_batches / n_trials);
    int pos[3] = {0, 0, 0};
    visited.clear();
    visited.insert(pack_coords(pos, d));
    meta.surviving[0]++;
    meta.batch_count[0][b]++;
    if (store_fields) counts[0][pack_coords(pos, d)] += 1.0;
    for (int t = 1; t <= T; ++t) {
      double u = rng.next_double();
      std::size_t idx = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
      if (idx >= sup.size()) idx = sup.size() - 1;
      for (int j = 0; j < d; ++j) pos[j] += sup[idx].x[j];
      std::int64_t key = pack_coords(pos, d);
      if (!visited.insert(key).second) break;  // first self-intersection kills the prefix
      meta.surviving[t]++;
      meta.batch_count[t][b]++;
      for (std::size_t ri = 0; ri < r_list.size(); ++ri)
        meta.batch_sum[ri][t][b] += moment_weight(pos, d, r_list[ri], axis);
      if (store_fields) counts[t][key] += 1.0;
    }
  }

  if (store_fields) {
    for (int t = 0; t <= T; ++t) {
      Field f = Field::delta(d, B, false);
      f.scale(0.0);
      int x[3];
      for (const auto& [key, c] : counts[t]) {
        unpack_coords(key, d, x);
        f.add(std::span<const int>(x, d), c / (double)n_trials);
      }
      f.set_time_index(t);
      run.fields.push_back(std::move(f));
    }
  }
  run.mc = std::move(meta);
  return run;
}

EvolutionRun simulate_op(const StepDistribution& D, const OPConfig& cfg) {
  require(cfg.p >= 0, errc::invalid, "p must be nonnegative");
  require(cfg.T >= 0, errc::invalid, "horizon must be nonnegative");
  require(cfg.n_trials >= 1, errc::invalid, "need at least one trial");
  auto sup = support_of(D);
  int d = D.dimension();
  double max_pd = 0;
  for (const auto& p : sup) max_pd = std::max(max_pd, cfg.p * p.w);
  require(max_pd < 1.0, errc::invalid, "p D(x) must stay below 1");
  long reach = (long)cfg.T * support_reach(sup, d);
  require(reach < (1 << 20), errc::invalid, "cluster range too large for packed coordinates");

  // survival prefix logs: S[j] = sum_{l<j} log(1 - p D_l)
  std::vector<double> S(sup.size() + 1, 0.0);
  for (std::size_t i = 0; i < sup.size(); ++i) S[i + 1] = S[i] + std::log1p(-cfg.p * sup[i].w);
  double total_log = S.back();

  EvolutionRun run;
  run.model = Model::op_mc;
  run.d = d;
  run.T = cfg.T;
  run.p = cfg.p;
  McMeta meta;
  meta.n_trials = cfg.n_trials;
  meta.seed = cfg.seed;
  meta.r_list = cfg.r_list;
  meta.axis = cfg.axis;
  meta.surviving.assign(cfg.T + 1, 0);
  meta.batch_count.assign(cfg.T + 1, std::vector<long long>(meta.n_batches, 0));
  meta.batch_sum.assign(cfg.r_list.size(),
                        std::vector<std::vector<double>>(cfg.T + 1,
                                                         std::vector<double>(meta.n_batches, 0.0)));
  std::vector<std::unordered_map<std::int64_t, double>> counts(cfg.store_fields ? cfg.T + 1 : 0);

  std::vector<std::int64_t> active, next;
  for (long long trial = 0; trial < cfg.n_trials; ++trial) {
    Rng rng(cfg.seed, (std::uint64_t)trial);
    int b = (int)(trial * meta.n_batches / cfg.n_trials);
    int origin[3] = {0, 0, 0};
    active.assign(1, pack_coords(origin, d));
    for (int t = 0; t <= cfg.T && !active.empty(); ++t) {
      meta.surviving[t]++;
      meta.batch_count[t][b] += (long long)active.size();
      int x[3];
      for (std::int64_t key : active) {
        unpack_coords(key, d, x);
        for (std::size_t ri = 0; ri < cfg.r_list.size(); ++ri)
          meta.batch_sum[ri][t][b] += moment_weight(x, d, cfg.r_list[ri], cfg.axis);
        if (cfg.store_fields) counts[t][key] += 1.0;
      }
      if (t == cfg.T) break;
      next.clear();
      for (std::int64_t key : active) {
        unpack_coords(key, d, x);
        // sequential sampling of the first occupied support index via the
        // survival prefix, then restart past it
        std::size_t i = 0;
        while (i < sup.size()) {
          double u = rng.next_double();
          if (u <= 0.0) u = 0x1.0p-53;
          double thr = S[i] + std::log(u);
          if (total_log >= thr) break;  // no further occupied bonds
          std::size_t lo = i + 1, hi = sup.size();
          while (lo < hi) {  // first index k with S[k] < thr
            std::size_t mid = (lo + hi) / 2;
            if (S[mid] < thr)
              hi = mid;
            else
              lo = mid + 1;
          }
          std::size_t j = lo - 1;
          int child[3];
          for (int jj = 0; jj < d; ++jj) child[jj] = x[jj] + sup[j].x[jj];
          next.push_back(pack_coords(child, d));
          // enforce the cap before dedup so an exploding (supercritical)
          // cloud fails fast instead of filling memory first
          require((long long)next.size() <= cfg.active_budget, errc::budget,
                  "active set exceeded budget; p is likely supercritical");
          i = j + 1;
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      active.swap(next);
    }
  }

  if (cfg.store_fields) {
    int B = std::max(1L, reach);
    for (int t = 0; t <= cfg.T; ++t) {
      Field f = Field::delta(d, (int)B, false);
      f.scale(0.0);
      int x[3];
      for (const auto& [key, c] : counts[t]) {
        unpack_coords(key, d, x);
        f.add(std::span<const int>(x, d), c / (double)cfg.n_trials);
      }
      f.set_time_index(t);
      run.fields.push_back(std::move(f));
    }
  }
  run.mc = std::move(meta);
  return run;
}

EvolutionRun op_exact_small_t(const StepDistribution& D, double p, int T) {
  require(p >= 0, errc::invalid, "p must be nonnegative");
  require(T >= 0, errc::invalid, "horizon must be nonnegative");
  auto sup = support_of(D);
  int d = D.dimension();
  int reach = support_reach(sup, d);
  int W = T * reach;
  int side = 2 * W + 1;
  double n_sites = std::pow((double)side, d);
  require(n_sites <= 24, errc::cost_cap,
          "window of " + std::to_string((long)n_sites) + " sites too large for exhaustive evolution");
  int nw = (int)n_sites;

  auto site_coords = [&](int bit, int* x) {
    int idx = bit;
    for (int j = d - 1; j >= 0; --j) {
      x[j] = idx % side - W;
      idx /= side;
    }
  };
  auto site_index = [&](const int* x) {
    int idx = 0;
    for (int j = 0; j < d; ++j) {
      if (x[j] < -W || x[j] > W) return -1;
      idx = idx * side + (x[j] + W);
    }
    return idx;
  };

  EvolutionRun run;
  run.model = Model::op_exact;
  run.d = d;
  run.T = T;
  run.p = p;

  std::unordered_map<std::uint32_t, double> cur;
  int origin[3] = {0, 0, 0};
  cur[(std::uint32_t)1 << site_index(origin)] = 1.0;

  for (int t = 0; t <= T; ++t) {
    Field f = Field::delta(d, std::max(W, 1));
    f.scale(0.0);
    f.set_time_index(t);
    int x[3];
    for (const auto& [mask, prob] : cur) {
      for (int bit = 0; bit < nw; ++bit) {
        if (!(mask & ((std::uint32_t)1 << bit))) continue;
        site_coords(bit, x);
        f.add(std::span<const int>(x, d), prob);
      }
    }
    run.fields.push_back(std::move(f));
    if (t == T) break;

    std::unordered_map<std::uint32_t, double> next;
    int xa[3], xc[3];
    for (const auto& [mask, prob] : cur) {
      if (mask == 0) {
        next[0] += prob;
        continue;
      }
      // occupation probability per candidate child site (children are
      // independent across sites: disjoint bond sets)
      std::vector<int> cand;
      std::vector<double> q;
      std::vector<double> vac(nw, 1.0);
      for (int bit = 0; bit < nw; ++bit) {
        if (!(mask & ((std::uint32_t)1 << bit))) continue;
        site_coords(bit, xa);
        for (const auto& sp : sup) {
          for (int j = 0; j < d; ++j) xc[j] = xa[j] + sp.x[j];
          int ci = site_index(xc);
          if (ci >= 0) vac[ci] *= 1.0 - p * sp.w;
        }
      }
      for (int ci = 0; ci < nw; ++ci)
        if (vac[ci] < 1.0) {
          cand.push_back(ci);
          q.push_back(1.0 - vac[ci]);
        }
      require(cand.size() <= 22, errc::cost_cap, "too many candidate children for exhaustive step");
      for (std::uint32_t sub = 0; sub < ((std::uint32_t)1 << cand.size()); ++sub) {
        double w = prob;
        std::uint32_t child_mask = 0;
        for (std::size_t ci = 0; ci < cand.size(); ++ci) {
          if (sub & ((std::uint32_t)1 << ci)) {
            w *= q[ci];
            child_mask |= (std::uint32_t)1 << cand[ci];
          } else {
            w *= 1.0 - q[ci];
          }
        }
        if (w != 0.0) next[child_mask] += w;
      }
    }
    cur.swap(next);
  }
  return run;
}

}  // namespace gyra
