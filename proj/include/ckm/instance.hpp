#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "ckm/types.hpp"

namespace ckm {

/// A clustering instance: a point set 0..n-1 with pairwise distances, an
/// unweighted connectivity graph over the same points, a cluster budget k
/// and optionally a fixed center set (assignment version).
template <typename Scalar = double>
struct Instance {
  int n = 0;
  MatrixX<Scalar> dist;  // n x n, symmetric, zero diagonal
  EdgeList edges;        // undirected, no self loops
  int k = 1;
  std::optional<std::vector<int>> fixed_centers;
  bool metric = true;  // whether dist claims the triangle inequality
};

inline std::vector<std::vector<int>> adjacency(int n, const EdgeList& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

/// Connectivity of the subgraph induced by `members` (empty sets count as
/// connected).
inline bool induces_connected(int n, const std::vector<std::vector<int>>& adj,
                              const std::vector<int>& members) {
  if (members.empty()) return true;
  std::vector<char> in_set(n, 0), seen(n, 0);
  for (int v : members) in_set[v] = 1;
  std::vector<int> stack{members.front()};
  seen[members.front()] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int w : adj[v])
      if (in_set[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return reached == static_cast<int>(members.size());
}

inline bool induces_connected(int n, const EdgeList& edges,
                              const std::vector<int>& members) {
  return induces_connected(n, adjacency(n, edges), members);
}

/// Structural checks on an instance; throws contract_error on the first
/// violated field invariant.
template <typename Scalar>
void check_instance(const Instance<Scalar>& inst,
                    Scalar tol = default_tol<Scalar>()) {
  if (inst.n <= 0) throw contract_error("instance: n must be positive");
  if (inst.dist.rows() != inst.n || inst.dist.cols() != inst.n)
    throw contract_error("instance: dist must be n x n");
  if (inst.k < 1) throw contract_error("instance: k must be at least 1");
  for (int i = 0; i < inst.n; ++i) {
    if (!(inst.dist(i, i) == Scalar(0)))
      throw contract_error("instance: dist diagonal must be zero");
    for (int j = 0; j < inst.n; ++j) {
      Scalar d = inst.dist(i, j);
      if (d < Scalar(0)) throw contract_error("instance: negative distance");
      Scalar gap = d - inst.dist(j, i);
      if (gap < Scalar(0)) gap = -gap;
      if (gap > tol) throw contract_error("instance: dist not symmetric");
    }
  }
  for (const auto& e : inst.edges) {
    if (e[0] < 0 || e[0] >= inst.n || e[1] < 0 || e[1] >= inst.n)
      throw contract_error("instance: edge endpoint out of range");
    if (e[0] == e[1]) throw contract_error("instance: self loop");
  }
  if (inst.fixed_centers) {
    for (int c : *inst.fixed_centers)
      if (c < 0 || c >= inst.n)
        throw contract_error("instance: fixed center out of range");
  }
  if (inst.metric) {
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.n; ++j)
        for (int l = 0; l < inst.n; ++l)
          if (inst.dist(i, j) > inst.dist(i, l) + inst.dist(l, j) + tol)
            throw contract_error("instance: triangle inequality violated");
  }
}

template <typename Scalar>
Instance<Scalar> make_instance(int n, MatrixX<Scalar> dist, EdgeList edges,
                               int k,
                               std::optional<std::vector<int>> centers = {},
                               bool metric = true,
                               Scalar tol = default_tol<Scalar>()) {
  Instance<Scalar> inst{n, std::move(dist), std::move(edges), k,
                        std::move(centers), metric};
  check_instance(inst, tol);
  return inst;
}

struct Cluster {
  int center = -1;
  std::vector<int> members;  // sorted, unique, contains center when feasible
};

struct Clustering {
  std::vector<Cluster> clusters;
};

inline Cluster make_cluster(int center, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return Cluster{center, std::move(members)};
}

enum class ViolationKind {
  invalid_index,
  cluster_count,
  center_membership,
  coverage,
  connectivity,
  disjointness,
};

struct Violation {
  ViolationKind kind;
  int cluster = -1;  // index into clusters, -1 for global violations
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    for (const auto& v : violations)
      if (v.kind == kind) return true;
    return false;
  }
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::invalid_index: return "invalid_index";
    case ViolationKind::cluster_count: return "cluster_count";
    case ViolationKind::center_membership: return "center_membership";
    case ViolationKind::coverage: return "coverage";
    case ViolationKind::connectivity: return "connectivity";
    case ViolationKind::disjointness: return "disjointness";
  }
  return "?";
}

/// Checks a clustering against an instance. Violations are data: the report
/// lists every broken constraint instead of throwing.
template <typename Scalar>
ValidationReport validate(const Instance<Scalar>& inst,
                          const Clustering& clustering, Variant variant) {
  ValidationReport report;
  auto note = [&](ViolationKind kind, int cluster, std::string detail) {
    report.violations.push_back({kind, cluster, std::move(detail)});
  };

  if (static_cast<int>(clustering.clusters.size()) > inst.k) {
    std::ostringstream os;
    os << clustering.clusters.size() << " clusters but k = " << inst.k;
    note(ViolationKind::cluster_count, -1, os.str());
  }

  auto adj = adjacency(inst.n, inst.edges);
  std::vector<int> membership_count(inst.n, 0);
  for (int ci = 0; ci < static_cast<int>(clustering.clusters.size()); ++ci) {
    const Cluster& cl = clustering.clusters[ci];
    bool indices_ok = cl.center >= 0 && cl.center < inst.n;
    for (int v : cl.members)
      if (v < 0 || v >= inst.n) indices_ok = false;
    if (!indices_ok) {
      note(ViolationKind::invalid_index, ci, "node index out of range");
      continue;
    }
    for (int v : cl.members) ++membership_count[v];
    if (std::find(cl.members.begin(), cl.members.end(), cl.center) ==
        cl.members.end()) {
      std::ostringstream os;
      os << "center " << cl.center << " not a member";
      note(ViolationKind::center_membership, ci, os.str());
    }
    if (!induces_connected(inst.n, adj, cl.members)) {
      std::ostringstream os;
      os << "cluster " << ci << " induces a disconnected subgraph";
      note(ViolationKind::connectivity, ci, os.str());
    }
  }
  for (int v = 0; v < inst.n; ++v) {
    if (membership_count[v] == 0) {
      std::ostringstream os;
      os << "node " << v << " uncovered";
      note(ViolationKind::coverage, -1, os.str());
    }
    if (variant == Variant::disjoint && membership_count[v] > 1) {
      std::ostringstream os;
      os << "node " << v << " in " << membership_count[v] << " clusters";
      note(ViolationKind::disjointness, -1, os.str());
    }
  }
  return report;
}

/// Sum of distances from each member to its cluster center; a node held by
/// several clusters pays once per membership.
template <typename Scalar>
Scalar evaluate_cost(const Instance<Scalar>& inst,
                     const Clustering& clustering) {
  Scalar total(0);
  for (const auto& cl : clustering.clusters) {
    if (cl.center < 0 || cl.center >= inst.n)
      throw contract_error("evaluate_cost: center index out of range");
    for (int v : cl.members) {
      if (v < 0 || v >= inst.n)
        throw contract_error("evaluate_cost: member index out of range");
      total += inst.dist(cl.center, v);
    }
  }
  return total;
}

/// Objective of a fractional assignment: sum over (v,c) of d(v,c) * x(v,c).
template <typename Scalar>
Scalar fractional_cost(const Instance<Scalar>& inst,
                       const FractionalAssignment<Scalar>& x) {
  if (x.rows() != inst.n || x.cols() != inst.n)
    throw contract_error("fractional_cost: dimension mismatch");
  return (inst.dist.array() * x.array()).sum();
}

/// Integral encoding of a clustering (centers must be pairwise distinct).
template <typename Scalar>
FractionalAssignment<Scalar> to_assignment(const Instance<Scalar>& inst,
                                           const Clustering& clustering) {
  FractionalAssignment<Scalar> x =
      FractionalAssignment<Scalar>::Zero(inst.n, inst.n);
  for (const auto& cl : clustering.clusters)
    for (int v : cl.members) x(v, cl.center) = Scalar(1);
  return x;
}

/// Numeric side of the assignment contract: entries non-negative, rows
/// covering, opening budget respected. Cut constraints are the solvers'
/// business and are checked by their separation sweeps.
template <typename Scalar>
bool assignment_in_budget(const FractionalAssignment<Scalar>& x, int k,
                          Scalar tol = default_tol<Scalar>()) {
  for (int v = 0; v < x.rows(); ++v) {
    if (x.row(v).sum() < Scalar(1) - tol) return false;
    for (int c = 0; c < x.cols(); ++c)
      if (x(v, c) < -tol) return false;
  }
  return x.diagonal().sum() <= Scalar(k) + tol;
}

}  // namespace ckm
