#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "ckm/cuts.hpp"
#include "ckm/instance.hpp"
#include "ckm/lp.hpp"

namespace ckm {

template <typename Scalar = double>
struct SteinerInstance {
  int n = 0;
  EdgeList edges;
  std::vector<int> terminals;
  VectorX<Scalar> weights;
};

namespace detail {

// Node-weighted shortest paths from one start node: cost of a path is the
// sum of weights of its nodes excluding both endpoints. Selected nodes are
// free. Returns per-node cost-including-own-weight plus parents.
template <typename Scalar>
struct NodeDijkstra {
  std::vector<std::optional<Scalar>> paid;  // weight along path incl. node
  std::vector<int> parent;

  NodeDijkstra(int n, const std::vector<std::vector<int>>& adj,
               const VectorX<Scalar>& weights, const std::vector<char>& free,
               int start)
      : paid(n), parent(n, -1) {
    auto effective = [&](int v) { return free[v] ? Scalar(0) : weights[v]; };
    using Item = std::pair<Scalar, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    paid[start] = Scalar(0);
    heap.push({Scalar(0), start});
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v]) continue;
      done[v] = 1;
      for (int u : adj[v]) {
        Scalar cand = *paid[v] + effective(u);
        if (!paid[u] || cand < *paid[u]) {
          paid[u] = cand;
          parent[u] = v;
          heap.push({cand, u});
        }
      }
    }
  }

  // interior-only cost to reach `target`
  std::optional<Scalar> interior_cost(int target, const VectorX<Scalar>& weights,
                                      const std::vector<char>& free) const {
    if (!paid[target]) return {};
    Scalar own = free[target] ? Scalar(0) : weights[target];
    return *paid[target] - own;
  }
};

}  // namespace detail

/// Node-weighted Steiner tree by spider merging: repeatedly pick the center
/// whose cheapest paths to r >= 2 terminal components minimize
/// (center weight + path interiors) / r, buy those nodes and merge. Bought
/// nodes (and terminals) cost nothing afterwards.
template <typename Scalar>
std::vector<int> node_weighted_steiner(const SteinerInstance<Scalar>& inst) {
  const int n = inst.n;
  if (inst.terminals.empty())
    throw contract_error("steiner: terminal set must be non-empty");
  for (int t : inst.terminals)
    if (t < 0 || t >= n) throw contract_error("steiner: terminal out of range");
  for (int v = 0; v < n; ++v)
    if (inst.weights[v] < Scalar(0))
      throw contract_error("steiner: negative weight");
  auto adj = adjacency(n, inst.edges);

  std::vector<int> comp(n, -1);  // component id per selected node
  std::vector<char> selected(n, 0);
  std::vector<int> roots;
  {
    std::vector<int> terms = inst.terminals;
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (int t : terms) {
      comp[t] = static_cast<int>(roots.size());
      roots.push_back(t);
      selected[t] = 1;
    }
  }

  // union-find over component ids
  std::vector<int> parent_of(roots.size());
  std::iota(parent_of.begin(), parent_of.end(), 0);
  auto find = [&](int a) {
    while (parent_of[a] != a) a = parent_of[a] = parent_of[parent_of[a]];
    return a;
  };
  auto live_components = [&]() {
    std::vector<int> live;
    for (std::size_t i = 0; i < parent_of.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i))
        live.push_back(static_cast<int>(i));
    return live;
  };

  while (live_components().size() > 1) {
    auto live = live_components();
    struct Spider {
      Scalar ratio_num;
      int ratio_den = 0;
      int center = -1;
      std::vector<int> targets;  // chosen path endpoints, one per component
    };
    std::optional<Spider> best;
    auto better = [&](const Spider& a, const Spider& b) {
      // compare a.num/a.den < b.num/b.den without division
      Scalar lhs = a.ratio_num * Scalar(b.ratio_den);
      Scalar rhs = b.ratio_num * Scalar(a.ratio_den);
      if (lhs != rhs) return lhs < rhs;
      if (a.center != b.center) return a.center < b.center;
      return a.ratio_den > b.ratio_den;
    };

    for (int v = 0; v < n; ++v) {
      detail::NodeDijkstra<Scalar> paths(n, adj, inst.weights, selected, v);
      struct Reach {
        Scalar cost;
        int node;
      };
      std::vector<Reach> reach;
      for (int id : live) {
        std::optional<Reach> nearest;
        for (int u = 0; u < n; ++u) {
          if (comp[u] < 0 || find(comp[u]) != id) continue;
          auto c = paths.interior_cost(u, inst.weights, selected);
          if (!c) continue;
          if (!nearest || *c < nearest->cost ||
              (*c == nearest->cost && u < nearest->node))
            nearest = Reach{*c, u};
        }
        if (nearest) reach.push_back(*nearest);
      }
      if (reach.size() < 2) continue;
      std::stable_sort(reach.begin(), reach.end(),
                       [](const Reach& a, const Reach& b) {
                         if (a.cost != b.cost) return a.cost < b.cost;
                         return a.node < b.node;
                       });
      Scalar own = selected[v] ? Scalar(0) : inst.weights[v];
      Scalar acc = own;
      for (std::size_t r = 1; r <= reach.size(); ++r) {
        acc += reach[r - 1].cost;
        if (r < 2) continue;
        Spider cand;
        cand.ratio_num = acc;
        cand.ratio_den = static_cast<int>(r);
        cand.center = v;
        for (std::size_t i = 0; i < r; ++i) cand.targets.push_back(reach[i].node);
        if (!best || better(cand, *best)) best = cand;
      }
    }
    if (!best)
      throw infeasible_error("steiner: terminals span multiple components");

    // buy the spider: center plus all path nodes toward each target
    detail::NodeDijkstra<Scalar> paths(n, adj, inst.weights, selected,
                                       best->center);
    auto buy = [&](int node) {
      if (comp[node] < 0) {
        comp[node] = static_cast<int>(parent_of.size());
        parent_of.push_back(comp[node]);
        selected[node] = 1;
      }
      return find(comp[node]);
    };
    int merged = buy(best->center);
    for (int target : best->targets) {
      int walk = target;
      while (walk != -1) {
        int root = buy(walk);
        if (root != merged) parent_of[root] = merged;
        merged = find(merged);
        walk = paths.parent[walk];
      }
    }
  }

  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (selected[v]) out.push_back(v);
  return out;
}

/// Optimal value of the fractional relaxation: minimize added (non-terminal)
/// weight subject to every vertex cut between two terminals carrying total
/// value at least one. Solved by cutting planes with min-cut separation.
template <typename Scalar>
Scalar steiner_lp_value(const SteinerInstance<Scalar>& inst,
                        Scalar sep_tol = Scalar(1e-7)) {
  using Term = typename LinearProgram<Scalar>::Term;
  using Sense = typename LinearProgram<Scalar>::Sense;
  const int n = inst.n;
  if (inst.terminals.empty())
    throw contract_error("steiner lp: terminal set must be non-empty");
  std::vector<char> is_terminal(n, 0);
  for (int t : inst.terminals) is_terminal[t] = 1;

  std::vector<std::vector<int>> cut_rows;
  std::set<std::vector<int>> seen;
  while (true) {
    LinearProgram<Scalar> lp;
    for (int v = 0; v < n; ++v) {
      lp.add_variable("x_" + std::to_string(v), Scalar(1));
      if (!is_terminal[v]) lp.add_objective(v, inst.weights[v]);
    }
    for (const auto& cut : cut_rows) {
      std::vector<Term> terms;
      for (int v : cut) terms.push_back({v, Scalar(1)});
      lp.add_row(std::move(terms), Sense::ge, Scalar(1));
    }
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
      throw solver_error("steiner lp: unexpected solver status");

    VectorX<Scalar> x = sol.values;
    int found = 0, violated = 0;
    for (std::size_t i = 0; i < inst.terminals.size(); ++i)
      for (std::size_t j = i + 1; j < inst.terminals.size(); ++j) {
        int s = inst.terminals[i], t = inst.terminals[j];
        if (s == t) continue;
        CutQuery<Scalar> q{n, inst.edges, x, {s}, {t}};
        auto cut = sep(q);
        if (cut.value < Scalar(1) - sep_tol) {
          ++violated;
          if (cut.cut_nodes.empty())
            throw infeasible_error("steiner lp: terminals disconnected");
          if (seen.insert(cut.cut_nodes).second) {
            cut_rows.push_back(cut.cut_nodes);
            ++found;
          }
        }
      }
    if (violated > 0 && found == 0)
      throw solver_error("steiner lp: separation stalled");
    if (found == 0) return sol.objective_value;
    if (static_cast<int>(cut_rows.size()) > 10 * n * n * n)
      throw solver_error("steiner lp: row cap exceeded");
  }
}

}  // namespace ckm
