#pragma once

#include <algorithm>
#include <queue>
#include <vector>

#include "ckm/types.hpp"

namespace ckm {

/// Dinic max flow on a directed residual graph. Scalar may be any ordered
/// field; phase count is bounded by the node count, so termination does not
/// depend on capacities being integral.
template <typename Scalar>
class FlowNetwork {
 public:
  explicit FlowNetwork(int n) : head_(n), level_(n), it_(n) {}

  void add_arc(int from, int to, Scalar cap) {
    head_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap});
    head_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, Scalar(0)});
  }

  Scalar max_flow(int s, int t) {
    Scalar total(0);
    while (build_levels(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        Scalar pushed = augment(s, t, unbounded());
        if (!(pushed > Scalar(0))) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from s in the residual graph (call after max_flow).
  std::vector<char> residual_reachable(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int id : head_[v]) {
        const Arc& a = arcs_[id];
        if (a.cap > Scalar(0) && !seen[a.to]) {
          seen[a.to] = 1;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

  Scalar arc_capacity(int id) const { return arcs_[id].cap; }

 private:
  struct Arc {
    int to;
    Scalar cap;
  };

  Scalar unbounded() const {
    Scalar m(1);
    for (const Arc& a : arcs_) m += a.cap;
    return m;
  }

  bool build_levels(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int id : head_[v]) {
        const Arc& a = arcs_[id];
        if (a.cap > Scalar(0) && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  Scalar augment(int v, int t, Scalar limit) {
    if (v == t) return limit;
    for (int& i = it_[v]; i < static_cast<int>(head_[v].size()); ++i) {
      int id = head_[v][i];
      Arc& a = arcs_[id];
      if (!(a.cap > Scalar(0)) || level_[a.to] != level_[v] + 1) continue;
      Scalar pushed = augment(a.to, t, std::min(limit, a.cap));
      if (pushed > Scalar(0)) {
        a.cap -= pushed;
        arcs_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
    return Scalar(0);
  }

  std::vector<std::vector<int>> head_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<int> it_;
};

/// A node-weighted separation query between two node sets of one graph.
/// A cut is a node set meeting every path between the sides; it may use
/// source and target nodes themselves.
template <typename Scalar = double>
struct CutQuery {
  int n = 0;
  EdgeList edges;
  VectorX<Scalar> weights;
  std::vector<int> source_set;
  std::vector<int> target_set;
};

template <typename Scalar = double>
struct CutResult {
  Scalar value{0};
  std::vector<int> cut_nodes;  // minimum cut N, taken on the source side
  std::vector<int> interior;   // nodes with no path to the targets in G - N
  std::vector<int> hull;       // cut_nodes plus interior
};

namespace detail {

// Node splitting: node v becomes arc in(v) -> out(v) of capacity w(v); each
// undirected edge becomes two uncuttable arcs. Sources are entered at their
// in-side and targets left at their out-side, so endpoint weights stay
// cuttable and {t} is a valid (s,t)-cut.
template <typename Scalar>
FlowNetwork<Scalar> split_network(const CutQuery<Scalar>& q) {
  Scalar inf(1);
  for (int v = 0; v < q.n; ++v) inf += q.weights[v];
  FlowNetwork<Scalar> net(2 * q.n + 2);
  const int src = 2 * q.n, dst = 2 * q.n + 1;
  for (int v = 0; v < q.n; ++v) net.add_arc(2 * v, 2 * v + 1, q.weights[v]);
  for (const auto& e : q.edges) {
    net.add_arc(2 * e[0] + 1, 2 * e[1], inf);
    net.add_arc(2 * e[1] + 1, 2 * e[0], inf);
  }
  for (int v : q.source_set) net.add_arc(src, 2 * v, inf);
  for (int v : q.target_set) net.add_arc(2 * v + 1, dst, inf);
  return net;
}

}  // namespace detail

/// Minimum node-weight vertex cut between the query's source and target
/// sets, with the cut set, its interior and hull.
template <typename Scalar>
CutResult<Scalar> sep(const CutQuery<Scalar>& q) {
  if (q.source_set.empty() || q.target_set.empty())
    throw contract_error("sep: source and target sets must be non-empty");
  for (int v = 0; v < q.n; ++v)
    if (q.weights[v] < Scalar(0)) throw contract_error("sep: negative weight");

  auto net = detail::split_network(q);
  CutResult<Scalar> result;
  result.value = net.max_flow(2 * q.n, 2 * q.n + 1);

  // Source-side min cut: split arcs crossing the residual reachability
  // frontier. Deterministic because arc order is fixed.
  auto reach = net.residual_reachable(2 * q.n);
  for (int v = 0; v < q.n; ++v)
    if (reach[2 * v] && !reach[2 * v + 1]) result.cut_nodes.push_back(v);

  // Interior: nodes that cannot reach any target once the cut is removed.
  std::vector<char> in_cut(q.n, 0), seen(q.n, 0);
  for (int v : result.cut_nodes) in_cut[v] = 1;
  auto adj = std::vector<std::vector<int>>(q.n);
  for (const auto& e : q.edges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::vector<int> stack;
  for (int t : q.target_set)
    if (!in_cut[t] && !seen[t]) {
      seen[t] = 1;
      stack.push_back(t);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!in_cut[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  for (int v = 0; v < q.n; ++v) {
    if (in_cut[v])
      result.hull.push_back(v);
    else if (!seen[v]) {
      result.interior.push_back(v);
      result.hull.push_back(v);
    }
  }
  return result;
}

template <typename Scalar>
Scalar sep_value(const CutQuery<Scalar>& q) {
  if (q.source_set.empty() || q.target_set.empty())
    throw contract_error("sep: source and target sets must be non-empty");
  auto net = detail::split_network(q);
  return net.max_flow(2 * q.n, 2 * q.n + 1);
}

/// Marginal increase of the separation value when v joins the source set.
/// An empty source set is allowed here with sep(empty, T) = 0, so the
/// marginal of the first element is its own separation value.
template <typename Scalar>
Scalar delta(const CutQuery<Scalar>& q, int v) {
  if (v < 0 || v >= q.n) throw contract_error("delta: node out of range");
  for (int s : q.source_set)
    if (s == v) return Scalar(0);
  CutQuery<Scalar> grown = q;
  grown.source_set.push_back(v);
  Scalar with_v = sep_value(grown);
  Scalar base = q.source_set.empty() ? Scalar(0) : sep_value(q);
  Scalar diff = with_v - base;
  return diff > Scalar(0) ? diff : Scalar(0);
}

/// Max flow between two single nodes under node capacities; by duality this
/// equals sep({s},{t}) on the same weights.
template <typename Scalar>
Scalar max_flow_value(int n, const EdgeList& edges,
                      const VectorX<Scalar>& node_capacities, int s, int t) {
  if (s == t) throw contract_error("max_flow_value: s and t must differ");
  CutQuery<Scalar> q{n, edges, node_capacities, {s}, {t}};
  return sep_value(q);
}

}  // namespace ckm
