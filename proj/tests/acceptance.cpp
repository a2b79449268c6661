// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not tuned per run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <vector>

#include "ckm/assign.hpp"
#include "ckm/centers.hpp"
#include "ckm/generators.hpp"
#include "ckm/lp_builders.hpp"
#include "ckm/oracle.hpp"
#include "ckm/tree_dp.hpp"

using namespace ckm;

namespace {

struct Criterion {
  int number;
  std::string title;
  bool passed = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    passed = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << why;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

EdgeList tree_from_pruefer(int n, const std::vector<int>& seq) {
  EdgeList edges;
  std::vector<int> degree(n, 1);
  for (int v : seq) ++degree[v];
  std::vector<char> used(n, 0);
  for (int v : seq)
    for (int u = 0; u < n; ++u)
      if (degree[u] == 1 && !used[u]) {
        edges.push_back({u, v});
        used[u] = 1;
        --degree[v];
        break;
      }
  std::vector<int> last;
  for (int u = 0; u < n; ++u)
    if (degree[u] == 1 && !used[u]) last.push_back(u);
  edges.push_back({last[0], last[1]});
  return edges;
}

MatrixX<double> seeded_distances(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatrixX<double> dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double d = i == j ? 0.0 : std::round(uniform_real(rng) * 64.0) / 8.0;
      dist(i, j) = d;
      dist(j, i) = d;
    }
  return dist;
}

// ---------------------------------------------------------------------------

Criterion criterion_tree_dp() {
  Criterion c{1, "tree DP equals the disjoint oracle on every tree (n <= 7)"};
  Stopwatch watch;
  long long solves = 0;
  double worst_gap = 0;
  for (int n = 1; n <= 7 && c.passed; ++n) {
    long long count = n <= 2 ? 1 : 1;
    for (int i = 0; i < n - 2; ++i) count *= n;
    std::vector<int> seq(std::max(0, n - 2), 0);
    for (long long code = 0; code < count; ++code) {
      long long rest = code;
      for (int i = 0; i < n - 2; ++i) {
        seq[i] = static_cast<int>(rest % n);
        rest /= n;
      }
      EdgeList edges = n >= 2 ? tree_from_pruefer(n, seq) : EdgeList{};
      for (int k = 1; k <= 3; ++k)
        for (int draw = 0; draw < 3; ++draw) {
          auto dist = seeded_distances(
              n, 0x9e3779b9ull * code + 101ull * k + draw);
          auto inst = make_instance<double>(n, dist, edges, k, {}, false);
          auto dp = solve_tree(inst, k);
          auto oracle = brute_force_disjoint(inst, k);
          worst_gap = std::max(worst_gap, std::abs(dp.cost - oracle.cost));
          ++solves;
        }
    }
  }
  c.require(worst_gap <= 1e-9, "cost gap above 1e-9");
  double secs = watch.seconds();
  c.require(secs < 120.0, "runtime above two minutes");
  c.detail << solves << " solves, worst gap " << worst_gap << ", "
           << secs << " s";
  return c;
}

Criterion criterion_lp_equivalence() {
  Criterion c{2, "flow and row-generation relaxations agree and lower-bound the oracle"};
  double worst_gap = 0;
  for (int i = 0; i < 50; ++i) {
    int n = 4 + i % 5;  // 4..8
    auto inst = gen_random(n, 2, 20000 + i);
    std::vector<int> centers{0, 1 + i % (n - 1)};
    auto flow = solve_flow_assignment_lp(inst, centers);
    auto cut = solve_cut_lp(inst, centers, 2);
    if (flow.status != LpStatus::optimal || cut.status != LpStatus::optimal) {
      c.fail("relaxation did not solve on instance " + std::to_string(i));
      continue;
    }
    double gap = std::abs(flow.objective - cut.objective);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6)
      c.fail("formulations disagree on instance " + std::to_string(i));
    auto oracle = brute_force_non_disjoint(inst, 2, centers);
    if (flow.objective > oracle.cost + 1e-6 ||
        cut.objective > oracle.cost + 1e-6)
      c.fail("relaxation exceeds the oracle on instance " + std::to_string(i));
  }
  c.detail << "50 instances, worst formulation gap " << worst_gap;
  return c;
}

Criterion criterion_assignment_pipeline() {
  Criterion c{3, "fixed-center pipeline is feasible and within 2k ln n of the relaxation"};
  Stopwatch watch;
  double worst_ratio = 0, ratio_sum = 0;
  for (int i = 0; i < 30; ++i) {
    int n = 3 + i % 4;  // 3..6
    auto inst = gen_random(n, 2, 30000 + i);
    std::vector<int> centers{0, 1 + i % (n - 1)};
    auto r = assign_non_disjoint(inst, centers);
    if (!validate(inst, r.clustering, Variant::non_disjoint).feasible()) {
      c.fail("infeasible output on instance " + std::to_string(i));
      continue;
    }
    double bound = 2.0 * 2.0 * std::log(double(n));
    if (r.cost > bound * r.lp_value + 1e-7)
      c.fail("cost above 2k ln n times the relaxation on instance " +
             std::to_string(i));
    auto oracle = brute_force_non_disjoint(inst, 2, centers);
    double ratio = oracle.cost > 0 ? r.cost / oracle.cost : 1.0;
    worst_ratio = std::max(worst_ratio, ratio);
    ratio_sum += ratio;
    if (ratio > bound + 1e-7)
      c.fail("oracle ratio above 2k ln n on instance " + std::to_string(i));
  }
  double secs = watch.seconds();
  c.require(secs < 60.0, "runtime above one minute");
  c.detail << "30 instances, mean ratio " << ratio_sum / 30.0
           << ", worst ratio " << worst_ratio << ", " << secs << " s";
  return c;
}

struct AuditRun {
  Instance<double> inst;
  int k;
  double lp_value = 0;
  FractionalAssignment<double> x_tilde;
  HalfOpenResult<double> half;
};

std::vector<AuditRun> audit_runs() {
  struct Config {
    int n, k;
    GraphModel model;
  };
  // twenty seeded runs, n up to 10, mixing graph models and budgets
  std::vector<Config> configs = {
      {4, 2, GraphModel::gnp},  {4, 3, GraphModel::tree},
      {5, 2, GraphModel::tree}, {5, 3, GraphModel::gnp},
      {5, 2, GraphModel::grid}, {6, 2, GraphModel::gnp},
      {6, 3, GraphModel::tree}, {6, 2, GraphModel::grid},
      {7, 2, GraphModel::gnp},  {7, 3, GraphModel::tree},
      {7, 2, GraphModel::tree}, {8, 2, GraphModel::tree},
      {8, 3, GraphModel::gnp},  {8, 2, GraphModel::grid},
      {9, 2, GraphModel::tree}, {9, 3, GraphModel::tree},
      {9, 2, GraphModel::grid}, {10, 2, GraphModel::tree},
      {10, 3, GraphModel::tree}, {10, 2, GraphModel::grid},
  };
  std::vector<AuditRun> runs;
  int seed = 0;
  for (auto cfg : configs) {
    AuditRun run;
    run.inst = gen_random(cfg.n, cfg.k, 40000 + seed++, cfg.model);
    run.k = cfg.k;
    auto lp = solve_flow_center_lp(run.inst, cfg.k);
    if (lp.status != LpStatus::optimal)
      throw solver_error("audit run relaxation failed");
    run.lp_value = lp.objective;
    run.x_tilde = lp.x;
    run.half = half_open(run.inst, lp.x, cfg.k);
    runs.push_back(std::move(run));
  }
  return runs;
}

Criterion criterion_half_open(const std::vector<AuditRun>& runs) {
  Criterion c{4, "half-opening keeps its invariants, budgets and cost bound"};
  int shifts = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    const auto& half = run.half;
    shifts += static_cast<int>(half.trace.size());
    std::string tag = " on run " + std::to_string(i);
    if (!half.audit.empty())
      c.fail("online invariant audit reported " +
             std::to_string(half.audit.size()) + " findings" + tag + " (" +
             half.audit.front() + ")");
    for (int ctr : half.centers)
      if (half.y(ctr, ctr) < 0.5 - 1e-7) c.fail("center below half opening" + tag);
    if (static_cast<int>(half.centers.size()) > 2 * run.k)
      c.fail("more than 2k centers" + tag);
    double cost_y = 0;
    for (int v = 0; v < run.inst.n; ++v)
      for (int ctr = 0; ctr < run.inst.n; ++ctr)
        cost_y += half.y(v, ctr) * run.inst.dist(v, ctr);
    if (cost_y > 20.0 * run.k * run.lp_value + 1e-6)
      c.fail("cost(y) above 20k cost(x~)" + tag);
    if (static_cast<int>(half.trace.size()) > run.inst.n * run.inst.n + 1)
      c.fail("shift budget exceeded" + tag);
  }
  c.detail << runs.size() << " runs, " << shifts
           << " shifts audited after every step at 1e-7";
  return c;
}

Criterion criterion_split(const std::vector<AuditRun>& runs) {
  Criterion c{5, "center splitting, potentials, cycle repair and z stay within their bounds"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    std::string tag = " on run " + std::to_string(i);
    try {
      auto split = split_centers(run.inst, run.half, run.k);
      if (!split.audit.empty())
        c.fail("budget invariant broke inside the retirement loop" + tag);
      if (split.fully_open.size() + 0.5 * split.half_open.size() >
          run.k + 1e-9)
        c.fail("|C1| + |C1/2|/2 above k at loop exit" + tag);

      double cost_y = split.cost_y;
      double phi_total = 0;
      for (int ctr : split.nearly_open) phi_total += split.potential.at(ctr);
      if (phi_total > 13.5 * run.k * run.lp_value + cost_y / 8 + 1e-6)
        c.fail("potential sum above 13.5k cost(x~) + cost(y)/8" + tag);

      double replace_sum = 0;
      for (int ctr : split.half_open) {
        bool nearly = std::find(split.nearly_open.begin(),
                                split.nearly_open.end(),
                                ctr) != split.nearly_open.end();
        if (!nearly) continue;
        replace_sum +=
            replacement_cost(run.inst, run.half.y, ctr, split.successor.at(ctr),
                             run.k);
      }
      if (replace_sum > 27.0 * run.k * run.lp_value + 0.25 * cost_y + 1e-6)
        c.fail("retired replacement sum above 27k cost(x~) + cost(y)/4" + tag);

      auto opened = break_cycles_bipartition(run.inst, split);
      auto z = integralize_centers(run.inst, run.half, split, opened, run.k);
      double cost_z = fractional_cost(run.inst, z);
      if (cost_z > 196.0 * run.k * run.lp_value + 1e-6)
        c.fail("cost(z) above 196k cost(x~)" + tag);
    } catch (const invariant_violation& e) {
      c.fail(std::string("invariant violation: ") + e.what() + tag);
    }
  }
  c.detail << runs.size() << " runs; odd-cycle repair never saw two nearly-open members";
  return c;
}

Criterion criterion_find_centers(const std::vector<AuditRun>& runs) {
  Criterion c{6, "end-to-end center finding stays feasible with at most k centers"};
  double worst_ratio = 0;
  int rated = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    std::string tag = " on run " + std::to_string(i);
    try {
      auto r = find_centers(run.inst, run.k);
      if (static_cast<int>(r.final_centers.size()) > run.k)
        c.fail("more than k final centers" + tag);
      if (!validate(run.inst, r.assignment.clustering, Variant::non_disjoint)
               .feasible())
        c.fail("infeasible output" + tag);
      if (run.inst.n <= 6 && run.k == 2) {
        auto oracle = brute_force_non_disjoint(run.inst, run.k);
        double ratio =
            oracle.cost > 0 ? r.assignment.cost / oracle.cost : 1.0;
        if (!std::isfinite(ratio)) c.fail("ratio not finite" + tag);
        worst_ratio = std::max(worst_ratio, ratio);
        ++rated;
      }
    } catch (const std::exception& e) {
      c.fail(std::string("threw: ") + e.what() + tag);
    }
  }
  c.detail << runs.size() << " runs, " << rated
           << " oracle ratios logged, worst " << worst_ratio;
  return c;
}

Criterion criterion_reductions() {
  Criterion c{7, "both hardness constructions show their cost dichotomies"};
  Stopwatch watch;

  struct Fixture {
    std::string name;
    CnfFormula cnf;
  };
  std::vector<Fixture> fixtures = {
      {"a2b2_sat", {2, {{1, 2}, {-1, -2}}}},
      {"a2b2_unsat", {2, {{1}, {-1}}}},
      {"a2b3_sat", {2, {{1, 2}, {-1, 2}, {1, -2}}}},
      {"a2b3_unsat", {2, {{1}, {-1}, {2}}}},
      {"a3b2_sat", {3, {{1, 2, 3}, {-1, -2, -3}}}},
      {"a3b2_unsat", {3, {{3}, {-3}}}},
      {"a3b3_sat", {3, {{1, 2, 3}, {-1, -2, 3}, {-3, 1}}}},
      {"a3b3_unsat", {3, {{1}, {-1}, {2, 3}}}},
  };
  int checked = 0;
  for (const auto& fixture : fixtures) {
    bool satisfiable = brute_force_satisfiable(fixture.cnf);  // independent
    for (int m : {2, 3}) {
      for (double eps : {0.0, 1e-4}) {
        auto inst = eps > 0 ? gen_from_3sat(fixture.cnf, m, eps)
                            : gen_from_3sat(fixture.cnf, m);
        double slack = eps * inst.n;
        auto r = brute_force_disjoint(inst, 2);
        double target = 2.0 * fixture.cnf.num_vars;
        ++checked;
        if (satisfiable) {
          if (std::abs(r.cost - target) > slack + 1e-9)
            c.fail(fixture.name + " m=" + std::to_string(m) +
                   ": satisfiable but optimum is not 2a");
        } else {
          if (r.cost < 2.0 * m - slack - 1e-9)
            c.fail(fixture.name + " m=" + std::to_string(m) +
                   ": unsatisfiable but optimum below 2m");
          if (std::abs(r.cost - target) <= slack + 1e-9)
            c.fail(fixture.name + " m=" + std::to_string(m) +
                   ": unsatisfiable yet optimum equals 2a");
        }
      }
    }
  }

  // dominating-set reduction over every labeled source graph with <= 5 nodes
  int graphs = 0;
  for (int n = 1; n <= 5 && c.passed; ++n) {
    std::vector<std::pair<int, int>> slots;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) slots.push_back({u, v});
    for (unsigned mask = 0; mask < (1u << slots.size()); ++mask) {
      EdgeList edges;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1u) edges.push_back({slots[s].first, slots[s].second});
      auto inst = gen_from_dominating_set(n, edges);
      auto r = brute_force_non_disjoint(inst, 2, inst.fixed_centers);
      int ds = brute_force_dominating_set(n, edges);
      ++graphs;
      if (std::abs(r.cost - ds) > 1e-9) {
        c.fail("dominating-set equivalence broke on a source graph with " +
               std::to_string(n) + " nodes");
        break;
      }
    }
  }
  double secs = watch.seconds();
  c.require(secs < 300.0, "runtime above five minutes");
  c.detail << checked << " formula instances (zero and epsilon distances), "
           << graphs << " source graphs, " << secs << " s";
  return c;
}

Criterion criterion_cut_properties() {
  Criterion c{8, "separation values are symmetric, submodular and cut-transitive"};
  std::mt19937_64 rng(0xCA7);
  long long checks = 0;
  for (int round = 0; round < 200 && c.passed; ++round) {
    int n = 2 + round % 5;  // 2..6
    auto edges = EdgeList{};
    VectorX<double> weights(n);
    {
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (uniform_real(rng) < 0.55) edges.push_back({u, v});
      for (int v = 0; v < n; ++v)
        weights[v] = std::round(uniform_real(rng) * 100.0) / 100.0;
    }
    auto subsets = [&](int bits) {
      std::vector<std::vector<int>> sets;
      for (unsigned m = 0; m < (1u << bits); ++m) {
        std::vector<int> s;
        for (int v = 0; v < bits; ++v)
          if (m >> v & 1u) s.push_back(v);
        sets.push_back(std::move(s));
      }
      return sets;
    };
    auto all = subsets(n);

    // symmetry over every non-empty pair
    for (const auto& S : all) {
      if (S.empty()) continue;
      for (const auto& T : all) {
        if (T.empty()) continue;
        CutQuery<double> fwd{n, edges, weights, S, T};
        CutQuery<double> bwd{n, edges, weights, T, S};
        ++checks;
        if (std::abs(sep_value(fwd) - sep_value(bwd)) > 1e-9) {
          c.fail("symmetry broke");
          goto done;
        }
      }
    }
    // submodular marginals and cut-of-cut over every S subset pair
    for (const auto& S : all)
      for (const auto& extra : all) {
        auto S_big = S;
        for (int v : extra)
          if (std::find(S_big.begin(), S_big.end(), v) == S_big.end())
            S_big.push_back(v);
        for (int t = 0; t < n; ++t)
          for (int v = 0; v < n; ++v) {
            CutQuery<double> small{n, edges, weights, S, {t}};
            CutQuery<double> big{n, edges, weights, S_big, {t}};
            ++checks;
            if (delta(big, v) > delta(small, v) + 1e-9) {
              c.fail("submodularity broke");
              goto done;
            }
          }
        if (!S.empty()) {
          int t = static_cast<int>(rng() % n);
          CutQuery<double> base{n, edges, weights, S, {t}};
          auto N = sep(base).cut_nodes;
          if (!N.empty()) {
            auto with = [&](std::vector<int> side) {
              for (int v : S_big)
                if (std::find(side.begin(), side.end(), v) == side.end())
                  side.push_back(v);
              return CutQuery<double>{n, edges, weights, side, {t}};
            };
            ++checks;
            if (sep_value(with(N)) < sep_value(with(S)) - 1e-9) {
              c.fail("cut-of-cut broke");
              goto done;
            }
          }
        }
      }
  }
done:
  c.detail << checks << " checks across 200 seeded graphs";
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  results.push_back(criterion_tree_dp());
  results.push_back(criterion_lp_equivalence());
  results.push_back(criterion_assignment_pipeline());
  auto runs = audit_runs();
  results.push_back(criterion_half_open(runs));
  results.push_back(criterion_split(runs));
  results.push_back(criterion_find_centers(runs));
  results.push_back(criterion_reductions());
  results.push_back(criterion_cut_properties());

  int failed = 0;
  for (const auto& c : results) {
    std::printf("[%s] criterion %d: %s (%s)\n", c.passed ? "PASS" : "FAIL",
                c.number, c.title.c_str(), c.detail.str().c_str());
    if (!c.passed) ++failed;
  }
  return failed;
}
