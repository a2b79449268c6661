#pragma once

#include <algorithm>
#include <bit>
#include <optional>
#include <vector>

#include "ckm/instance.hpp"

namespace ckm {

template <typename Scalar = double>
struct OracleResult {
  Scalar cost{0};
  Clustering clustering;
};

namespace detail {

inline bool mask_connected(unsigned mask, const std::vector<unsigned>& nbr) {
  if (mask == 0) return true;
  unsigned seed = mask & (~mask + 1);
  unsigned seen = seed;
  while (true) {
    unsigned frontier = 0;
    unsigned rest = seen;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      frontier |= nbr[v] & mask;
    }
    unsigned grown = seen | frontier;
    if (grown == seen) break;
    seen = grown;
  }
  return seen == mask;
}

inline std::vector<unsigned> neighbor_masks(int n, const EdgeList& edges) {
  std::vector<unsigned> nbr(n, 0);
  for (const auto& e : edges) {
    nbr[e[0]] |= 1u << e[1];
    nbr[e[1]] |= 1u << e[0];
  }
  return nbr;
}

inline std::vector<int> mask_to_nodes(unsigned mask) {
  std::vector<int> nodes;
  while (mask) {
    nodes.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return nodes;
}

// Exhaustive search over disjoint bipartitions for a fixed ordered center
// pair: side 0 holds c1, side 1 holds c2. Branches on nodes by decreasing
// center-distance gap with an admissible remaining-cost bound, and prunes
// sides whose nodes can no longer reach their center.
template <typename Scalar>
class TwoSplit {
 public:
  TwoSplit(const Instance<Scalar>& inst,
           const std::vector<std::vector<int>>& adj, int c1, int c2)
      : inst_(inst), adj_(adj), c1_(c1), c2_(c2), side_(inst.n, kFree) {
    side_[c1_] = 0;
    side_[c2_] = 1;
    for (int v = 0; v < inst_.n; ++v)
      if (v != c1_ && v != c2_) order_.push_back(v);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      Scalar ga = gap(a), gb = gap(b);
      if (ga != gb) return ga > gb;
      return a < b;
    });
    lb_free_ = Scalar(0);
    for (int v : order_) lb_free_ += cheapest(v);
  }

  void run(std::optional<Scalar>& best, std::vector<int>& best_side) {
    if (best && lb_free_ >= *best) return;
    descend(0, Scalar(0), lb_free_, best, best_side);
  }

 private:
  static constexpr int kFree = 2;

  Scalar gap(int v) const {
    Scalar d = inst_.dist(c1_, v) - inst_.dist(c2_, v);
    return d < Scalar(0) ? -d : d;
  }
  Scalar cheapest(int v) const {
    return std::min(inst_.dist(c1_, v), inst_.dist(c2_, v));
  }

  bool side_reachable(int center, int banned_side) const {
    std::vector<char> seen(inst_.n, 0);
    std::vector<int> stack{center};
    seen[center] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj_[v])
        if (!seen[w] && side_[w] != banned_side) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    int own = banned_side ^ 1;
    for (int v = 0; v < inst_.n; ++v)
      if (side_[v] == own && !seen[v]) return false;
    return true;
  }

  void descend(std::size_t idx, Scalar cost, Scalar lb_rest,
               std::optional<Scalar>& best, std::vector<int>& best_side) {
    if (best && cost + lb_rest >= *best) return;
    if (idx == order_.size()) {
      if (!side_reachable(c1_, 1) || !side_reachable(c2_, 0)) return;
      best = cost;
      best_side = side_;
      return;
    }
    int v = order_[idx];
    Scalar d0 = inst_.dist(c1_, v), d1 = inst_.dist(c2_, v);
    int first = d0 <= d1 ? 0 : 1;
    for (int attempt = 0; attempt < 2; ++attempt) {
      int s = first ^ attempt;
      Scalar dv = s == 0 ? d0 : d1;
      side_[v] = s;
      // a node stranded from its center can never be repaired later
      if (side_reachable(c1_, 1) && side_reachable(c2_, 0))
        descend(idx + 1, cost + dv, lb_rest - cheapest(v), best, best_side);
      side_[v] = kFree;
    }
  }

  const Instance<Scalar>& inst_;
  const std::vector<std::vector<int>>& adj_;
  int c1_, c2_;
  std::vector<int> side_;
  std::vector<int> order_;
  Scalar lb_free_;
};

// Restricted-growth-string enumeration of set partitions into at most k
// blocks; each block must induce a connected subgraph.
template <typename Scalar>
void rgs_descend(const Instance<Scalar>& inst,
                 const std::vector<unsigned>& nbr, int k,
                 std::vector<int>& label, int idx, int used,
                 std::optional<Scalar>& best, std::vector<int>& best_label) {
  if (idx == inst.n) {
    std::vector<unsigned> block(used, 0);
    for (int v = 0; v < inst.n; ++v) block[label[v]] |= 1u << v;
    Scalar cost(0);
    for (int b = 0; b < used; ++b) {
      if (!mask_connected(block[b], nbr)) return;
      std::optional<Scalar> block_cost;
      for (unsigned cm = block[b]; cm; cm &= cm - 1) {
        int c = std::countr_zero(cm);
        Scalar sum(0);
        for (unsigned vm = block[b]; vm; vm &= vm - 1)
          sum += inst.dist(c, std::countr_zero(vm));
        if (!block_cost || sum < *block_cost) block_cost = sum;
      }
      cost += *block_cost;
    }
    if (!best || cost < *best) {
      best = cost;
      best_label = label;
    }
    return;
  }
  int limit = std::min(used + 1, k);
  for (int b = 0; b < limit; ++b) {
    label[idx] = b;
    rgs_descend(inst, nbr, k, label, idx + 1, std::max(used, b + 1), best,
                best_label);
  }
}

template <typename Scalar>
Clustering label_clustering(const Instance<Scalar>& inst,
                            const std::vector<int>& label, int blocks) {
  Clustering out;
  for (int b = 0; b < blocks; ++b) {
    std::vector<int> members;
    for (int v = 0; v < inst.n; ++v)
      if (label[v] == b) members.push_back(v);
    if (members.empty()) continue;
    std::optional<Scalar> best;
    int center = -1;
    for (int c : members) {
      Scalar sum(0);
      for (int v : members) sum += inst.dist(c, v);
      if (!best || sum < *best) {
        best = sum;
        center = c;
      }
    }
    out.clusters.push_back(make_cluster(center, std::move(members)));
  }
  return out;
}

}  // namespace detail

/// Exact disjoint optimum by exhaustive enumeration. General k enumerates
/// canonical set partitions (guarded to n <= 10); k = 2 runs a dedicated
/// bounded search over center pairs and handles larger reduction fixtures.
/// With fixed centers the assignment version is solved instead.
template <typename Scalar>
OracleResult<Scalar> brute_force_disjoint(
    const Instance<Scalar>& inst, int k,
    std::optional<std::vector<int>> centers = {}) {
  if (k < 1) throw contract_error("brute_force_disjoint: k must be >= 1");
  if (inst.n > 30)
    throw contract_error("brute_force_disjoint: size guard (n <= 30)");
  auto adj = adjacency(inst.n, inst.edges);
  auto nbr = detail::neighbor_masks(inst.n, inst.edges);
  const unsigned full = (1u << inst.n) - 1u;

  if (centers) {
    std::sort(centers->begin(), centers->end());
    if (static_cast<int>(centers->size()) != k)
      throw contract_error("brute_force_disjoint: need exactly k centers");
  }

  if (k == 2) {
    std::optional<Scalar> best;
    std::vector<int> best_side;
    int best_c1 = -1, best_c2 = -1;
    // single connected cluster is also a feasible k<=2 outcome
    std::optional<Scalar> single;
    int single_center = -1;
    if (!centers && detail::mask_connected(full, nbr)) {
      for (int c = 0; c < inst.n; ++c) {
        Scalar sum = inst.dist.row(c).sum();
        if (!single || sum < *single) {
          single = sum;
          single_center = c;
        }
      }
    }
    std::vector<std::pair<int, int>> pairs;
    if (centers) {
      pairs.push_back({(*centers)[0], (*centers)[1]});
    } else {
      for (int c1 = 0; c1 < inst.n; ++c1)
        for (int c2 = c1 + 1; c2 < inst.n; ++c2) pairs.push_back({c1, c2});
      // cheap admissible bound per pair; visiting promising pairs first
      // makes the shared upper bound effective
      std::stable_sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
        Scalar la(0), lb(0);
        for (int v = 0; v < inst.n; ++v) {
          la += std::min(inst.dist(a.first, v), inst.dist(a.second, v));
          lb += std::min(inst.dist(b.first, v), inst.dist(b.second, v));
        }
        return la < lb;
      });
    }
    if (single) best = *single;
    for (auto [c1, c2] : pairs) {
      detail::TwoSplit<Scalar> search(inst, adj, c1, c2);
      std::vector<int> side;
      std::optional<Scalar> before = best;
      search.run(best, side);
      if (best != before) {
        best_side = side;
        best_c1 = c1;
        best_c2 = c2;
      }
    }
    if (!best) throw infeasible_error("brute_force_disjoint: no partition");
    OracleResult<Scalar> result;
    result.cost = *best;
    if (best_c1 < 0) {
      std::vector<int> all(inst.n);
      for (int v = 0; v < inst.n; ++v) all[v] = v;
      result.clustering.clusters.push_back(
          make_cluster(single_center, std::move(all)));
    } else {
      std::vector<int> a, b;
      for (int v = 0; v < inst.n; ++v)
        (best_side[v] == 0 ? a : b).push_back(v);
      result.clustering.clusters.push_back(make_cluster(best_c1, std::move(a)));
      result.clustering.clusters.push_back(make_cluster(best_c2, std::move(b)));
    }
    return result;
  }

  if (inst.n > 10)
    throw contract_error("brute_force_disjoint: size guard (n <= 10)");

  if (centers) {
    // assignment version: every node picks one of the fixed centers and
    // every center stays in its own cluster
    double work = 1;
    for (int v = 0; v < inst.n; ++v) work *= k;
    if (work > 8e6)
      throw contract_error("brute_force_disjoint: size guard (assignment)");
    std::vector<int> pick(inst.n, 0), best_pick;
    std::optional<Scalar> best;
    std::vector<int> center_of(inst.n, -1);
    for (int i = 0; i < k; ++i) center_of[(*centers)[i]] = i;
    auto descend = [&](auto&& self, int v, Scalar cost) -> void {
      if (best && cost >= *best) return;
      if (v == inst.n) {
        std::vector<unsigned> block(k, 0);
        for (int u = 0; u < inst.n; ++u) block[pick[u]] |= 1u << u;
        for (int i = 0; i < k; ++i)
          if (!detail::mask_connected(block[i], nbr)) return;
        best = cost;
        best_pick = pick;
        return;
      }
      if (center_of[v] >= 0) {
        pick[v] = center_of[v];
        self(self, v + 1, cost);
        return;
      }
      for (int i = 0; i < k; ++i) {
        pick[v] = i;
        self(self, v + 1, cost + inst.dist((*centers)[i], v));
      }
    };
    descend(descend, 0, Scalar(0));
    if (!best) throw infeasible_error("brute_force_disjoint: infeasible");
    OracleResult<Scalar> result;
    result.cost = *best;
    for (int i = 0; i < k; ++i) {
      std::vector<int> members;
      for (int v = 0; v < inst.n; ++v)
        if (best_pick[v] == i) members.push_back(v);
      result.clustering.clusters.push_back(
          make_cluster((*centers)[i], std::move(members)));
    }
    return result;
  }

  std::vector<int> label(inst.n, 0), best_label;
  std::optional<Scalar> best;
  detail::rgs_descend(inst, nbr, k, label, 0, 0, best, best_label);
  if (!best) throw infeasible_error("brute_force_disjoint: no partition");
  int blocks = 1 + *std::max_element(best_label.begin(), best_label.end());
  return {*best, detail::label_clustering(inst, best_label, blocks)};
}

/// Exact non-disjoint optimum: every cluster is a connected set containing
/// its center and the union must cover all nodes. Enumerates connected
/// candidate sets per center in increasing cost order.
template <typename Scalar>
OracleResult<Scalar> brute_force_non_disjoint(
    const Instance<Scalar>& inst, int k,
    std::optional<std::vector<int>> centers = {}) {
  if (k < 1) throw contract_error("brute_force_non_disjoint: k must be >= 1");
  if (centers) {
    if (inst.n > 12)
      throw contract_error(
          "brute_force_non_disjoint: size guard (fixed centers, n <= 12)");
    if (static_cast<int>(centers->size()) != k)
      throw contract_error("brute_force_non_disjoint: need exactly k centers");
  } else if (inst.n * k > 14) {
    throw contract_error("brute_force_non_disjoint: size guard (n*k <= 14)");
  }

  auto nbr = detail::neighbor_masks(inst.n, inst.edges);
  const unsigned full = (1u << inst.n) - 1u;

  // all connected sets containing c, cheapest first
  auto candidates = [&](int c) {
    std::vector<std::pair<Scalar, unsigned>> sets;
    for (unsigned mask = 0; mask <= full; ++mask) {
      if (!(mask >> c & 1u)) continue;
      if (!detail::mask_connected(mask, nbr)) continue;
      Scalar cost(0);
      for (unsigned m = mask; m; m &= m - 1)
        cost += inst.dist(c, std::countr_zero(m));
      sets.push_back({cost, mask});
    }
    std::stable_sort(sets.begin(), sets.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return sets;
  };

  std::optional<Scalar> best;
  std::vector<unsigned> best_masks;
  std::vector<int> best_centers;

  auto solve_for_centers = [&](const std::vector<int>& cs) {
    std::vector<std::vector<std::pair<Scalar, unsigned>>> cand;
    for (int c : cs) cand.push_back(candidates(c));
    std::vector<unsigned> chosen(cs.size(), 0);
    auto descend = [&](auto&& self, std::size_t i, Scalar cost,
                       unsigned covered) -> void {
      if (best && cost >= *best) return;
      if (i == cs.size()) {
        if (covered == full) {
          best = cost;
          best_masks = chosen;
          best_centers = cs;
        }
        return;
      }
      for (const auto& [set_cost, mask] : cand[i]) {
        if (best && cost + set_cost >= *best) break;  // sorted by cost
        chosen[i] = mask;
        self(self, i + 1, cost + set_cost, covered | mask);
      }
    };
    descend(descend, 0, Scalar(0), 0u);
  };

  if (centers) {
    solve_for_centers(*centers);
  } else {
    std::vector<int> combo(k);
    auto choose = [&](auto&& self, int start, int depth) -> void {
      if (depth == k) {
        solve_for_centers(combo);
        return;
      }
      for (int c = start; c < inst.n; ++c) {
        combo[depth] = c;
        self(self, c + 1, depth + 1);
      }
    };
    choose(choose, 0, 0);
  }

  if (!best) throw infeasible_error("brute_force_non_disjoint: no cover");
  OracleResult<Scalar> result;
  result.cost = *best;
  for (std::size_t i = 0; i < best_masks.size(); ++i)
    result.clustering.clusters.push_back(make_cluster(
        best_centers[i], detail::mask_to_nodes(best_masks[i])));
  return result;
}

/// Minimum dominating set size by subset enumeration (n <= 16).
inline int brute_force_dominating_set(int n, const EdgeList& edges) {
  if (n <= 0 || n > 16)
    throw contract_error("brute_force_dominating_set: size guard (n <= 16)");
  std::vector<unsigned> closed(n);
  for (int v = 0; v < n; ++v) closed[v] = 1u << v;
  for (const auto& e : edges) {
    closed[e[0]] |= 1u << e[1];
    closed[e[1]] |= 1u << e[0];
  }
  const unsigned full = (1u << n) - 1u;
  int best = n;
  for (unsigned mask = 0; mask <= full; ++mask) {
    unsigned dominated = 0;
    for (unsigned m = mask; m; m &= m - 1)
      dominated |= closed[std::countr_zero(m)];
    if (dominated == full)
      best = std::min(best, static_cast<int>(std::popcount(mask)));
  }
  return best;
}

}  // namespace ckm
