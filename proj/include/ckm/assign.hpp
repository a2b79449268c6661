#pragma once

#include <map>
#include <vector>

#include "ckm/instance.hpp"
#include "ckm/lp_builders.hpp"
#include "ckm/steiner.hpp"

namespace ckm {

template <typename Scalar = double>
struct AssignmentResult {
  Clustering clustering;
  Scalar lp_value{0};
  std::map<int, std::vector<int>> terminal_sets;
  Scalar cost{0};
};

template <typename Scalar = double>
struct AssignOptions {
  bool trim = false;                 // post-pass, never needed for guarantees
  Scalar terminal_tol = Scalar(1e-7);
};

namespace detail {

template <typename Scalar>
void trim_overlaps(const Instance<Scalar>& inst, Clustering& clustering) {
  auto adj = adjacency(inst.n, inst.edges);
  for (int v = 0; v < inst.n; ++v) {
    std::vector<int> holders;
    for (int ci = 0; ci < static_cast<int>(clustering.clusters.size()); ++ci) {
      const auto& m = clustering.clusters[ci].members;
      if (std::find(m.begin(), m.end(), v) != m.end()) holders.push_back(ci);
    }
    if (holders.size() < 2) continue;
    int keep = holders.front();
    for (int ci : holders)
      if (inst.dist(v, clustering.clusters[ci].center) <
          inst.dist(v, clustering.clusters[keep].center))
        keep = ci;
    for (int ci : holders) {
      if (ci == keep) continue;
      auto& cl = clustering.clusters[ci];
      if (cl.center == v) continue;
      std::vector<int> without;
      for (int m : cl.members)
        if (m != v) without.push_back(m);
      if (induces_connected(inst.n, adj, without)) cl.members = without;
    }
  }
}

}  // namespace detail

/// Non-disjoint assignment to fixed centers: solve the relaxation, scale by
/// the center count so every node is fully assigned somewhere, read off
/// per-center terminal sets and connect each one with a node-weighted
/// Steiner tree under w(v) = d(v,c). Works for non-metric distances.
template <typename Scalar>
AssignmentResult<Scalar> assign_non_disjoint(
    const Instance<Scalar>& inst, const std::vector<int>& centers,
    const AssignOptions<Scalar>& options = {}) {
  if (centers.empty())
    throw contract_error("assign_non_disjoint: centers must be non-empty");
  for (int c : centers)
    if (c < 0 || c >= inst.n)
      throw contract_error("assign_non_disjoint: center out of range");

  // every node must reach some center before the relaxation can cover it
  {
    auto adj = adjacency(inst.n, inst.edges);
    std::vector<char> seen(inst.n, 0);
    std::vector<int> stack;
    for (int c : centers)
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    for (int v = 0; v < inst.n; ++v)
      if (!seen[v])
        throw infeasible_error("assign_non_disjoint: node unreachable from every center");
  }

  auto lp = solve_flow_assignment_lp(inst, centers);
  if (lp.status != LpStatus::optimal)
    throw solver_error("assign_non_disjoint: relaxation did not solve");

  AssignmentResult<Scalar> result;
  result.lp_value = lp.objective;

  const Scalar scale(static_cast<int>(centers.size()));
  FractionalAssignment<Scalar> x = scale * lp.x;

  std::vector<char> covered(inst.n, 0);
  for (int c : centers) {
    std::vector<int> terminals{c};
    for (int v = 0; v < inst.n; ++v)
      if (v != c && x(v, c) >= Scalar(1) - options.terminal_tol)
        terminals.push_back(v);
    std::sort(terminals.begin(), terminals.end());
    for (int t : terminals) covered[t] = 1;
    result.terminal_sets[c] = std::move(terminals);
  }
  for (int v = 0; v < inst.n; ++v)
    if (!covered[v])
      throw invariant_violation(
          "assign_non_disjoint: scaling left a node without a full assignment");

  for (int c : centers) {
    SteinerInstance<Scalar> steiner{inst.n, inst.edges,
                                    result.terminal_sets[c],
                                    inst.dist.col(c)};
    auto nodes = node_weighted_steiner(steiner);
    result.clustering.clusters.push_back(make_cluster(c, std::move(nodes)));
  }
  if (options.trim) detail::trim_overlaps(inst, result.clustering);
  result.cost = evaluate_cost(inst, result.clustering);
  return result;
}

}  // namespace ckm
