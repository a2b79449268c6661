#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "ckm/instance.hpp"

namespace ckm {

/// Rooted view of a tree connectivity graph with subtree membership and
/// height-ordered traversal baked in. Children are kept in ascending index
/// order so merge results are deterministic.
struct RootedTree {
  int root = 0;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<int> tin, tout;     // preorder interval per subtree
  std::vector<int> height;        // longest downward path
  std::vector<int> by_height;     // nodes sorted by (height, index)

  bool in_subtree(int a, int b) const {
    return tin[a] <= tin[b] && tin[b] < tout[a];
  }
};

inline RootedTree root_tree(int n, const EdgeList& edges, int root = 0) {
  if (static_cast<int>(edges.size()) != n - 1)
    throw contract_error("tree dp: connectivity graph is not a tree");
  auto adj = adjacency(n, edges);
  RootedTree t;
  t.root = root;
  t.parent.assign(n, -1);
  t.children.assign(n, {});
  t.tin.assign(n, -1);
  t.tout.assign(n, -1);
  t.height.assign(n, 0);

  // iterative DFS, children visited in ascending index order
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  std::vector<char> seen(n, 0);
  seen[root] = 1;
  int clock = 0;
  t.tin[root] = clock++;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < adj[v].size()) {
      int w = adj[v][next++];
      if (seen[w]) continue;
      seen[w] = 1;
      t.parent[w] = v;
      t.children[v].push_back(w);
      t.tin[w] = clock++;
      stack.push_back({w, 0});
    } else {
      t.tout[v] = clock;
      stack.pop_back();
      if (t.parent[v] >= 0)
        t.height[t.parent[v]] =
            std::max(t.height[t.parent[v]], t.height[v] + 1);
    }
  }
  for (int v = 0; v < n; ++v)
    if (!seen[v]) throw contract_error("tree dp: connectivity graph is not connected");

  t.by_height.resize(n);
  for (int v = 0; v < n; ++v) t.by_height[v] = v;
  std::stable_sort(t.by_height.begin(), t.by_height.end(), [&](int a, int b) {
    if (t.height[a] != t.height[b]) return t.height[a] < t.height[b];
    return a < b;
  });
  return t;
}

namespace detail {

// costs carry an explicit infinity so additions never overflow
template <typename Scalar>
using Cost = std::optional<Scalar>;

template <typename Scalar>
Cost<Scalar> add(const Cost<Scalar>& a, const Cost<Scalar>& b) {
  if (!a || !b) return {};
  return *a + *b;
}

template <typename Scalar>
bool improves(const Cost<Scalar>& cand, const Cost<Scalar>& best) {
  if (!cand) return false;
  return !best || *cand < *best;
}

}  // namespace detail

template <typename Scalar = double>
struct TreeDpResult {
  Scalar cost{0};
  Clustering clustering;
  long long operations = 0;  // inner-loop work, for complexity checks
};

namespace detail {

// Exact dynamic program over the rooted tree. tab(a,b,k') holds the cheapest
// cost of T_a when a is assigned to b: for b within T_a the subtree is
// self-contained around b ("inside" table), otherwise nodes may follow a to
// the external center b ("outside" table).
template <typename Scalar>
class TreeDp {
 public:
  TreeDp(const Instance<Scalar>& inst, int k)
      : inst_(inst), k_(k), tree_(root_tree(inst.n, inst.edges)) {
    const int n = inst_.n;
    tab_.assign(static_cast<std::size_t>(n) * n * (k_ + 1), {});
    best_inside_.assign(static_cast<std::size_t>(n) * (k_ + 1), {});
    best_inside_arg_.assign(static_cast<std::size_t>(n) * (k_ + 1), -1);
    outside_uses_inside_.assign(static_cast<std::size_t>(n) * n * (k_ + 1), 0);
  }

  void run() {
    for (int a : tree_.by_height) {
      if (tree_.children[a].empty())
        fill_leaf(a);
      else
        fill_internal(a);
    }
  }

  Cost<Scalar> optimum() const {
    return best_inside_[tree_.root * (k_ + 1) + k_];
  }

  Clustering reconstruct() {
    auto total = optimum();
    if (!total) throw infeasible_error("tree dp: no feasible clustering");
    assignment_.assign(inst_.n, -1);
    emit_inside(tree_.root, best_inside_arg_[tree_.root * (k_ + 1) + k_], k_);
    std::vector<std::vector<int>> members(inst_.n);
    for (int v = 0; v < inst_.n; ++v) members[assignment_[v]].push_back(v);
    Clustering out;
    for (int c = 0; c < inst_.n; ++c)
      if (!members[c].empty()) out.clusters.push_back(make_cluster(c, members[c]));
    return out;
  }

  long long operations() const { return operations_; }

 private:
  struct Choice {
    int variant = -1;  // 0: b inside merged prefix, 1: b inside new child
    int split = -1;    // centers given to the prefix
  };

  long long slot_(int a, int b, int kp) const {
    return (static_cast<long long>(a) * inst_.n + b) * (k_ + 1) + kp;
  }

  void fill_leaf(int a) {
    for (int b = 0; b < inst_.n; ++b)
      for (int kp = 0; kp <= k_; ++kp) {
        ++operations_;
        if (b == a) {
          if (kp >= 1) tab_[slot_(a, b, kp)] = Scalar(0);
        } else {
          tab_[slot_(a, b, kp)] =
              kp >= 1 ? Scalar(0) : Cost<Scalar>{inst_.dist(a, b)};
          outside_uses_inside_[slot_(a, b, kp)] = kp >= 1;
        }
      }
    finalize_best_inside(a);
  }

  void fill_internal(int a) {
    const int n = inst_.n;
    const auto& kids = tree_.children[a];
    const int z = static_cast<int>(kids.size());

    // scratch[i][slot(b,kp)] for the tree spanning a and the first i kids;
    // X-values where b lies in that span, Y-values elsewhere
    auto scratch_slot = [this, n](int b, int kp) { return b * (k_ + 1) + kp; };
    std::vector<std::vector<Cost<Scalar>>> scratch(
        z + 1, std::vector<Cost<Scalar>>(static_cast<std::size_t>(n) * (k_ + 1)));
    choices_.assign(static_cast<std::size_t>(z + 1) * n * (k_ + 1), Choice{});

    auto in_span = [&](int b, int i) {
      if (b == a) return true;
      for (int j = 0; j < i; ++j)
        if (tree_.in_subtree(kids[j], b)) return true;
      return false;
    };

    for (int b = 0; b < n; ++b)
      for (int kp = 0; kp <= k_; ++kp) {
        ++operations_;
        auto& out = scratch[1][scratch_slot(b, kp)];
        if (b == a) {
          if (kp >= 1) out = tab_[slot_(kids[0], a, kp - 1)];
        } else if (tree_.in_subtree(kids[0], b)) {
          out = detail::add(Cost<Scalar>{inst_.dist(a, b)},
                            tab_[slot_(kids[0], b, kp)]);
        } else {
          out = detail::add(Cost<Scalar>{inst_.dist(a, b)},
                            tab_[slot_(kids[0], b, kp)]);
        }
      }

    for (int i = 1; i < z; ++i) {
      int child = kids[i];
      for (int b = 0; b < n; ++b) {
        bool b_in_prefix = in_span(b, i);
        bool b_in_child = tree_.in_subtree(child, b);
        for (int kp = 0; kp <= k_; ++kp) {
          Cost<Scalar> best;
          Choice choice;
          if (b_in_prefix) {
            for (int k1 = 1; k1 <= kp; ++k1) {
              ++operations_;
              auto cand = detail::add(scratch[i][scratch_slot(b, k1)],
                                      tab_[slot_(child, b, kp - k1)]);
              if (detail::improves(cand, best)) {
                best = cand;
                choice = {0, k1};
              }
            }
          } else if (b_in_child) {
            for (int k1 = 0; k1 <= kp - 1; ++k1) {
              ++operations_;
              auto cand = detail::add(scratch[i][scratch_slot(b, k1)],
                                      tab_[slot_(child, b, kp - k1)]);
              if (detail::improves(cand, best)) {
                best = cand;
                choice = {1, k1};
              }
            }
          } else {
            for (int k1 = 0; k1 <= kp; ++k1) {
              ++operations_;
              auto cand = detail::add(scratch[i][scratch_slot(b, k1)],
                                      tab_[slot_(child, b, kp - k1)]);
              if (detail::improves(cand, best)) {
                best = cand;
                choice = {0, k1};
              }
            }
          }
          scratch[i + 1][scratch_slot(b, kp)] = best;
          choices_[(static_cast<std::size_t>(i + 1) * n + b) * (k_ + 1) + kp] =
              choice;
        }
      }
    }

    for (int b = 0; b < n; ++b)
      for (int kp = 0; kp <= k_; ++kp)
        tab_[slot_(a, b, kp)] = scratch[z][scratch_slot(b, kp)];
    finalize_best_inside(a);
    // outside columns may instead self-contain the subtree
    for (int b = 0; b < n; ++b) {
      if (tree_.in_subtree(a, b)) continue;
      for (int kp = 0; kp <= k_; ++kp) {
        auto inside = best_inside_[a * (k_ + 1) + kp];
        auto& cell = tab_[slot_(a, b, kp)];
        if (detail::improves(inside, cell)) {
          cell = inside;
          outside_uses_inside_[slot_(a, b, kp)] = 1;
        }
      }
    }
    // keep per-node choices for reconstruction
    stored_choices_[a] = std::move(choices_);
  }

  void finalize_best_inside(int a) {
    for (int kp = 0; kp <= k_; ++kp) {
      Cost<Scalar> best;
      int arg = -1;
      for (int b = 0; b < inst_.n; ++b) {
        if (!tree_.in_subtree(a, b)) continue;
        auto cand = tab_[slot_(a, b, kp)];
        if (detail::improves(cand, best)) {
          best = cand;
          arg = b;
        }
      }
      best_inside_[a * (k_ + 1) + kp] = best;
      best_inside_arg_[a * (k_ + 1) + kp] = arg;
    }
  }

  // --- reconstruction ----------------------------------------------------

  void emit_inside(int a, int b, int kp) {
    if (tree_.children[a].empty()) {
      assignment_[a] = a;
      return;
    }
    emit_span(a, b, kp, static_cast<int>(tree_.children[a].size()));
  }

  void emit_span(int a, int b, int kp, int i) {
    const auto& kids = tree_.children[a];
    const int n = inst_.n;
    if (i == 1) {
      if (b == a) {
        assignment_[a] = a;
        emit_outside(kids[0], a, kp - 1);
      } else if (tree_.in_subtree(kids[0], b)) {
        assignment_[a] = b;
        emit_inside(kids[0], b, kp);
      } else {
        assignment_[a] = b;
        emit_outside(kids[0], b, kp);
      }
      return;
    }
    const auto& choice =
        stored_choices_.at(a)[(static_cast<std::size_t>(i) * n + b) * (k_ + 1) + kp];
    int child = kids[i - 1];
    if (choice.variant == 0) {
      emit_span(a, b, choice.split, i - 1);
      emit_outside(child, b, kp - choice.split);
    } else {
      emit_span(a, b, choice.split, i - 1);
      emit_inside(child, b, kp - choice.split);
    }
  }

  void emit_outside(int a, int b, int kp) {
    if (outside_uses_inside_[slot_(a, b, kp)]) {
      emit_inside(a, best_inside_arg_[a * (k_ + 1) + kp], kp);
      return;
    }
    if (tree_.children[a].empty()) {
      assignment_[a] = b;
      return;
    }
    emit_span(a, b, kp, static_cast<int>(tree_.children[a].size()));
  }

  const Instance<Scalar>& inst_;
  int k_;
  RootedTree tree_;
  std::vector<Cost<Scalar>> tab_;
  std::vector<Cost<Scalar>> best_inside_;
  std::vector<int> best_inside_arg_;
  std::vector<char> outside_uses_inside_;
  std::vector<Choice> choices_;
  std::map<int, std::vector<Choice>> stored_choices_;
  std::vector<int> assignment_;
  long long operations_ = 0;
};

// Assignment version with fixed centers: single table J(a, f) = cost of
// T_a when a is assigned to center f; the child on the path toward an
// in-subtree f is forced to follow, every other child either follows or
// self-contains around the best center inside its own subtree.
template <typename Scalar>
class TreeAssignDp {
 public:
  TreeAssignDp(const Instance<Scalar>& inst, const std::vector<int>& centers)
      : inst_(inst), centers_(centers),
        tree_(root_tree(inst.n, inst.edges)) {
    is_center_.assign(inst.n, 0);
    for (int c : centers_) is_center_[c] = 1;
  }

  void run() {
    const int n = inst_.n;
    const int f_count = static_cast<int>(centers_.size());
    table_.assign(static_cast<std::size_t>(n) * f_count, {});
    best_self_.assign(n, {});
    best_self_arg_.assign(n, -1);
    for (int a : tree_.by_height) {
      for (int fi = 0; fi < f_count; ++fi) {
        ++operations_;
        int f = centers_[fi];
        if (is_center_[a] && a != f) continue;  // centers stay home
        Cost<Scalar> total{inst_.dist(a, f)};
        auto prefer_first = [](const Cost<Scalar>& x, const Cost<Scalar>& y) {
          if (!x) return y;
          if (!y) return x;
          return *x <= *y ? x : y;
        };
        for (int ch : tree_.children[a]) {
          bool forced = f != a && tree_.in_subtree(ch, f);
          auto follow = table_[static_cast<std::size_t>(ch) * f_count + fi];
          auto cand = forced ? follow : prefer_first(follow, best_self_[ch]);
          total = detail::add(total, cand);
          ++operations_;
        }
        table_[static_cast<std::size_t>(a) * f_count + fi] = total;
      }
      for (int fi = 0; fi < f_count; ++fi) {
        int f = centers_[fi];
        if (!tree_.in_subtree(a, f)) continue;
        auto cand = table_[static_cast<std::size_t>(a) * f_count + fi];
        if (detail::improves(cand, best_self_[a])) {
          best_self_[a] = cand;
          best_self_arg_[a] = fi;
        }
      }
    }
  }

  Cost<Scalar> optimum() const { return best_self_[tree_.root]; }

  Clustering reconstruct() {
    if (!optimum()) throw infeasible_error("tree dp: no feasible assignment");
    assignment_.assign(inst_.n, -1);
    emit(tree_.root, best_self_arg_[tree_.root]);
    std::vector<std::vector<int>> members(inst_.n);
    for (int v = 0; v < inst_.n; ++v) members[assignment_[v]].push_back(v);
    Clustering out;
    for (int c : centers_)
      out.clusters.push_back(make_cluster(c, members[c]));
    return out;
  }

  long long operations() const { return operations_; }

 private:
  void emit(int a, int fi) {
    const int f_count = static_cast<int>(centers_.size());
    int f = centers_[fi];
    assignment_[a] = f;
    for (int ch : tree_.children[a]) {
      bool forced = f != a && tree_.in_subtree(ch, f);
      auto follow = table_[static_cast<std::size_t>(ch) * f_count + fi];
      if (forced) {
        emit(ch, fi);
        continue;
      }
      if (follow && (!best_self_[ch] || !(*best_self_[ch] < *follow)))
        emit(ch, fi);
      else
        emit(ch, best_self_arg_[ch]);
    }
  }

  const Instance<Scalar>& inst_;
  std::vector<int> centers_;
  RootedTree tree_;
  std::vector<char> is_center_;
  std::vector<detail::Cost<Scalar>> table_;
  std::vector<detail::Cost<Scalar>> best_self_;
  std::vector<int> best_self_arg_;
  std::vector<int> assignment_;
  long long operations_ = 0;
};

}  // namespace detail

/// Exact optimum of the disjoint problem on a tree connectivity graph, with
/// the reconstructed clustering. Distances may be arbitrary non-negative
/// values. With fixed centers the cheaper assignment recursion runs instead.
template <typename Scalar>
TreeDpResult<Scalar> solve_tree(const Instance<Scalar>& inst, int k,
                                std::optional<std::vector<int>> fixed_centers = {}) {
  if (k < 1) throw contract_error("tree dp: k must be >= 1");
  TreeDpResult<Scalar> result;
  if (fixed_centers) {
    auto centers = *fixed_centers;
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    if (centers.empty() || static_cast<int>(centers.size()) > k)
      throw contract_error("tree dp: need between 1 and k distinct centers");
    for (int c : centers)
      if (c < 0 || c >= inst.n)
        throw contract_error("tree dp: center out of range");
    detail::TreeAssignDp<Scalar> dp(inst, centers);
    dp.run();
    auto best = dp.optimum();
    if (!best) throw infeasible_error("tree dp: infeasible");
    result.cost = *best;
    result.clustering = dp.reconstruct();
    result.operations = dp.operations();
    return result;
  }
  detail::TreeDp<Scalar> dp(inst, k);
  dp.run();
  auto best = dp.optimum();
  if (!best) throw infeasible_error("tree dp: infeasible");
  result.cost = *best;
  result.clustering = dp.reconstruct();
  result.operations = dp.operations();
  return result;
}

}  // namespace ckm
