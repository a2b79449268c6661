#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "ckm/assign.hpp"
#include "ckm/cuts.hpp"
#include "ckm/instance.hpp"
#include "ckm/lp_builders.hpp"
#include "ckm/steiner.hpp"

namespace ckm {

/// Per-node aggregates of a fractional assignment: total mass, total price
/// and their quotient, the average service radius.
template <typename Scalar = double>
struct RadiiProfile {
  VectorX<Scalar> mass;    // row sums
  VectorX<Scalar> price;   // distance-weighted row sums
  VectorX<Scalar> radius;  // price / mass
  std::vector<int> order;  // nodes by (radius, index)
};

template <typename Scalar>
RadiiProfile<Scalar> compute_radii(const Instance<Scalar>& inst,
                                   const FractionalAssignment<Scalar>& x) {
  if (x.rows() != inst.n || x.cols() != inst.n)
    throw contract_error("compute_radii: dimension mismatch");
  RadiiProfile<Scalar> out;
  out.mass = x.rowwise().sum();
  out.price.resize(inst.n);
  out.radius.resize(inst.n);
  for (int v = 0; v < inst.n; ++v) {
    out.price[v] = (x.row(v).transpose().array() * inst.dist.row(v).transpose().array()).sum();
    if (!(out.mass[v] > Scalar(0)))
      throw contract_error("compute_radii: node carries no assignment mass");
    out.radius[v] = out.price[v] / out.mass[v];
  }
  out.order.resize(inst.n);
  for (int v = 0; v < inst.n; ++v) out.order[v] = v;
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (out.radius[a] != out.radius[b]) return out.radius[a] < out.radius[b];
    return a < b;
  });
  return out;
}

template <typename Scalar = double>
struct ShiftEvent {
  int source;       // node whose opening shrinks
  int via;          // environment node the assignment is reversed through
  int target;       // chosen center gaining opening
  Scalar amount;    // opening moved
  Scalar distance;  // d(target, source)
};

/// Mutable state of the half-opening sweep. Openings still held by x are
/// gradually shifted onto chosen centers; y records, per (source, target)
/// pair, how much every node ends up assigned to the target.
template <typename Scalar = double>
struct HalfOpenState {
  const Instance<Scalar>* inst = nullptr;
  int k = 1;
  FractionalAssignment<Scalar> x_tilde;  // frozen relaxation solution
  FractionalAssignment<Scalar> x;        // current shiftable marginals
  FractionalAssignment<Scalar> y_total;  // aggregated assignments to centers
  std::map<std::pair<int, int>, VectorX<Scalar>> y;  // (source,target) slices
  std::map<std::pair<int, int>, VectorX<Scalar>> u;  // first-shift snapshots
  std::vector<std::vector<int>> shift_targets;       // per source column
  std::vector<int> centers;
  std::map<int, std::vector<int>> environment;
  RadiiProfile<Scalar> radii;
  std::size_t next_in_queue = 0;       // index into radii.order
  std::optional<Scalar> radius_limit;  // 4 * r_next; empty means unlimited
  int shift_count = 0;
  std::vector<ShiftEvent<Scalar>> trace;
  Scalar zero_floor{1e-9};

  bool queue_empty() const { return next_in_queue >= radii.order.size(); }
};

namespace detail {

template <typename Scalar>
Scalar marginal_increase(const HalfOpenState<Scalar>& state, int source,
                         Scalar base, int v) {
  const auto& targets = state.shift_targets[source];
  if (std::find(targets.begin(), targets.end(), v) != targets.end())
    return Scalar(0);
  CutQuery<Scalar> q{state.inst->n, state.inst->edges,
                     state.x_tilde.col(source), targets, {source}};
  q.source_set.push_back(v);
  Scalar grown = sep_value(q);
  Scalar diff = grown - base;
  return diff > Scalar(0) ? diff : Scalar(0);
}

}  // namespace detail

/// One shift: reverse the assignment of `via` to `source`, add that value
/// to the target's opening and lift every node's slice toward the new
/// opening, capped by the first-shift snapshot.
template <typename Scalar>
void apply_shift(HalfOpenState<Scalar>& state, int source, int target, int via) {
  auto env = state.environment.find(target);
  if (env == state.environment.end() ||
      std::find(env->second.begin(), env->second.end(), via) == env->second.end())
    throw contract_error("apply_shift: via node is not in the target environment");
  Scalar f = state.x(via, source);
  if (!(f > Scalar(0)))
    throw contract_error("apply_shift: nothing to shift over this node");

  const int n = state.inst->n;
  auto key = std::pair{source, target};
  if (!state.u.count(key)) state.u[key] = state.x.col(source);
  if (!state.y.count(key)) state.y[key] = VectorX<Scalar>::Zero(n);

  state.shift_targets[source].push_back(via);
  std::sort(state.shift_targets[source].begin(), state.shift_targets[source].end());

  // recompute the source column as marginal cut increases; values only
  // decrease, and dust below the floor is dropped so every (via, source)
  // pair shifts at most once
  Scalar base;
  {
    CutQuery<Scalar> q{n, state.inst->edges, state.x_tilde.col(source),
                       state.shift_targets[source], {source}};
    base = sep_value(q);
  }
  for (int v = 0; v < n; ++v) {
    Scalar next = detail::marginal_increase(state, source, base, v);
    if (next > state.x(v, source)) next = state.x(v, source);
    if (!(next > state.zero_floor)) next = Scalar(0);
    state.x(v, source) = next;
  }

  auto& slice = state.y[key];
  const auto& snapshot = state.u[key];
  slice[target] += f;
  state.y_total(target, target) += f;
  for (int v = 0; v < n; ++v) {
    if (v == target) continue;
    Scalar lifted = std::min(snapshot[v], slice[target]);
    if (lifted > slice[v]) {
      state.y_total(v, target) += lifted - slice[v];
      slice[v] = lifted;
    }
  }

  ++state.shift_count;
  state.trace.push_back({source, via, target, f,
                         state.inst->dist(target, source)});
}

template <typename Scalar = double>
struct HalfOpenResult {
  FractionalAssignment<Scalar> y;  // aggregated, columns live on centers
  std::map<std::pair<int, int>, VectorX<Scalar>> y_slices;
  std::vector<int> centers;
  std::map<int, std::vector<int>> environment;
  RadiiProfile<Scalar> radii;
  std::vector<ShiftEvent<Scalar>> trace;
  std::vector<std::string> audit;  // violations found by the online auditor
};

template <typename Scalar = double>
struct HalfOpenOptions {
  std::optional<bool> audit;  // default: on for n <= 12
  Scalar audit_tol{1e-7};
  Scalar tol{1e-9};
};

namespace detail {

// online invariant audit; quadratic many min-cuts, so flag-gated
template <typename Scalar>
void audit_half_open(const HalfOpenState<Scalar>& state, Scalar tol,
                     std::vector<std::string>& findings) {
  const int n = state.inst->n;
  const Scalar alpha = Scalar(1) / Scalar(8 * state.k);
  auto note = [&](const char* what, int v, int c) {
    std::ostringstream os;
    os << what << " violated at (" << v << "," << c << ") after shift "
       << state.shift_count;
    findings.push_back(os.str());
  };
  for (int v = 0; v < n; ++v) {
    Scalar covered = state.x.row(v).sum() + state.y_total.row(v).sum();
    if (covered < Scalar(1) - tol) note("coverage", v, -1);
  }
  Scalar opened = state.x.diagonal().sum() + state.y_total.diagonal().sum();
  if (opened > Scalar(state.k) + tol) note("opening budget", -1, -1);
  for (int c = 0; c < n; ++c) {
    VectorX<Scalar> wx = state.x.col(c);
    for (int v = 0; v < n; ++v) {
      if (v == c || !(state.x(v, c) > tol)) continue;
      CutQuery<Scalar> q{n, state.inst->edges, wx, {v}, {c}};
      if (sep_value(q) < state.x(v, c) - tol) note("x connectivity", v, c);
    }
  }
  for (int c : state.centers) {
    VectorX<Scalar> wy = state.y_total.col(c);
    for (int v = 0; v < n; ++v) {
      if (v == c) continue;
      Scalar need = std::min(alpha, state.y_total(v, c));
      if (!(need > tol)) continue;
      CutQuery<Scalar> q{n, state.inst->edges, wy, {v}, {c}};
      if (sep_value(q) < need - tol) note("y connectivity", v, c);
    }
  }
}

// cheapest executable shift: a center whose environment still separates
// positively from some source column, minimizing the travel distance
template <typename Scalar>
std::optional<std::tuple<Scalar, int, int>> cheapest_shift(
    const HalfOpenState<Scalar>& state) {
  std::optional<std::tuple<Scalar, int, int>> best;
  for (int target : state.centers) {
    const auto& env = state.environment.at(target);
    for (int source = 0; source < state.inst->n; ++source) {
      // sep over the environment is positive iff some member still holds
      // marginal toward the source; the cheap screen keeps cut calls rare
      bool any = false;
      for (int v : env)
        if (state.x(v, source) > state.zero_floor) {
          any = true;
          break;
        }
      if (!any) continue;
      CutQuery<Scalar> q{state.inst->n, state.inst->edges,
                         state.x.col(source), env, {source}};
      if (!(sep_value(q) > state.zero_floor)) continue;
      Scalar d = state.inst->dist(target, source);
      auto cand = std::tuple{d, target, source};
      if (!best || cand < *best) best = cand;
    }
  }
  return best;
}

template <typename Scalar>
void drain_shifts(HalfOpenState<Scalar>& state, bool audit, Scalar audit_tol,
                  std::vector<std::string>& findings) {
  const int n = state.inst->n;
  while (true) {
    auto best = cheapest_shift(state);
    if (!best) return;
    auto [d, target, source] = *best;
    if (state.radius_limit && d > *state.radius_limit) return;
    while (true) {
      int via = -1;
      for (int v : state.environment.at(target))
        if (state.x(v, source) > Scalar(0)) {
          via = v;
          break;
        }
      if (via < 0) break;
      apply_shift(state, source, target, via);
      if (state.shift_count > n * n + 1)
        throw invariant_violation("half_open: shift budget n^2 exhausted");
      if (audit) audit_half_open(state, audit_tol, findings);
    }
  }
}

}  // namespace detail

/// Half-opening sweep: processes nodes by increasing radius, either chooses
/// them as centers (enough nearby shiftable mass) or attaches them to the
/// nearest sufficiently-connected center, then executes every shift whose
/// distance fits under four times the next radius. Ends with x == 0.
template <typename Scalar>
HalfOpenResult<Scalar> half_open(const Instance<Scalar>& inst,
                                 const FractionalAssignment<Scalar>& x_tilde,
                                 int k, const HalfOpenOptions<Scalar>& options = {}) {
  if (k < 1) throw contract_error("half_open: k must be >= 1");
  const int n = inst.n;
  const bool audit = options.audit.value_or(n <= 12);
  const Scalar alpha = Scalar(1) / Scalar(8 * k);

  HalfOpenState<Scalar> state;
  state.inst = &inst;
  state.k = k;
  state.x_tilde = x_tilde;
  state.x = x_tilde;
  state.y_total = FractionalAssignment<Scalar>::Zero(n, n);
  state.shift_targets.assign(n, {});
  state.radii = compute_radii(inst, x_tilde);
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < n; ++c)
      if (!(state.x(v, c) > state.zero_floor)) state.x(v, c) = Scalar(0);

  std::vector<std::string> findings;
  auto x_left = [&]() { return state.x.sum() > Scalar(0); };

  while (x_left()) {
    if (state.queue_empty())
      throw invariant_violation(
          "half_open: marginals remain but no shift is possible");
    int node = state.radii.order[state.next_in_queue++];
    Scalar r_star = state.radii.radius[node];

    Scalar good_mass(0);
    for (int c = 0; c < n; ++c)
      if (inst.dist(c, node) <= Scalar(4) * r_star) good_mass += state.x(node, c);

    if (good_mass >= Scalar(1) / Scalar(2) - options.tol) {
      state.centers.push_back(node);
      state.environment[node] = {node};
    } else {
      int pick = -1;
      for (int c : state.centers) {
        if (state.y_total(node, c) < alpha - options.tol) continue;
        if (pick < 0 || inst.dist(node, c) < inst.dist(node, pick) ||
            (inst.dist(node, c) == inst.dist(node, pick) && c < pick))
          pick = c;
      }
      if (pick < 0)
        throw invariant_violation(
            "half_open: node has neither enough nearby mass nor a connected center");
      state.environment[pick].push_back(node);
      std::sort(state.environment[pick].begin(), state.environment[pick].end());
    }

    if (state.queue_empty())
      state.radius_limit.reset();  // everything left may shift
    else
      state.radius_limit =
          Scalar(4) * state.radii.radius[state.radii.order[state.next_in_queue]];
    detail::drain_shifts(state, audit, options.audit_tol, findings);
  }

  HalfOpenResult<Scalar> result;
  result.y = std::move(state.y_total);
  result.y_slices = std::move(state.y);
  result.centers = std::move(state.centers);
  result.environment = std::move(state.environment);
  result.radii = std::move(state.radii);
  result.trace = std::move(state.trace);
  result.audit = std::move(findings);
  return result;
}

/// Cost of replacing center c by another center: every unit of mass on c
/// may travel d(c, target) further, and a thin connection to the target
/// must first be bought up to strength 1/(16k) by scaling the target's
/// incoming assignments.
template <typename Scalar>
Scalar replacement_cost(const Instance<Scalar>& inst,
                        const FractionalAssignment<Scalar>& y, int c,
                        int target, int k) {
  Scalar link = y(c, target);
  if (!(link > Scalar(0)))
    throw contract_error("replacement_cost: no assignment toward the target");
  Scalar mass = y.col(c).sum();
  Scalar base = mass * inst.dist(c, target);
  Scalar threshold = Scalar(1) / Scalar(16 * k);
  if (link >= threshold) return base;
  Scalar target_price(0);
  for (int v = 0; v < inst.n; ++v) target_price += y(v, target) * inst.dist(v, target);
  return base + target_price / link * threshold;
}

template <typename Scalar = double>
struct CenterSplit {
  std::vector<int> fully_open;   // C1
  std::vector<int> half_open;    // C 1/2, each with a successor
  std::map<int, int> successor;
  std::vector<int> nearly_open;  // O: centers with y_c^c >= 3/4
  std::map<int, Scalar> a;           // 1 - y_c^c
  std::map<int, Scalar> mass;        // M_c
  std::map<int, Scalar> potential;   // Phi_c
  Scalar cost_y{0};
  std::vector<std::string> audit;
};

/// Splits the chosen centers into fully-open and half-open sets with
/// successors, keeping |C1| + |C1/2|/2 within k. Nearly-open centers are
/// retired in order of potential per unopened mass; walking the successor
/// chain pins the far end fully open so no cycle gains two of them.
template <typename Scalar>
CenterSplit<Scalar> split_centers(const Instance<Scalar>& inst,
                                  const HalfOpenResult<Scalar>& half, int k,
                                  Scalar tol = Scalar(1e-9)) {
  const Scalar threshold = Scalar(1) / Scalar(16 * k);
  CenterSplit<Scalar> split;
  split.cost_y = Scalar(0);
  for (int c : half.centers)
    for (int v = 0; v < inst.n; ++v)
      split.cost_y += half.y(v, c) * inst.dist(v, c);

  std::vector<int> centers = half.centers;
  std::sort(centers.begin(), centers.end());
  std::vector<int> remaining;  // O', ascending
  for (int c : centers) {
    Scalar open = half.y(c, c);
    Scalar a = Scalar(1) - open;
    if (a < Scalar(0)) a = Scalar(0);
    if (a > Scalar(1)) a = Scalar(1);
    split.a[c] = a;
    split.mass[c] = half.y.col(c).sum();
    if (open < Scalar(3) / Scalar(4)) {
      // nearly half-open: a close, already-connected successor exists
      int pick = -1;
      for (int other : centers) {
        if (other == c || half.y(c, other) < threshold - tol) continue;
        if (pick < 0 || inst.dist(c, other) < inst.dist(c, pick) ||
            (inst.dist(c, other) == inst.dist(c, pick) && other < pick))
          pick = other;
      }
      if (pick < 0)
        throw invariant_violation("split_centers: no successor for a half-open center");
      split.successor[c] = pick;
      split.half_open.push_back(c);
    } else {
      split.nearly_open.push_back(c);
      remaining.push_back(c);
    }
  }
  for (int c : split.nearly_open)
    split.potential[c] =
        Scalar(3) * split.mass[c] * half.radii.radius[c] + split.cost_y * threshold;

  auto audit_budget = [&]() {
    Scalar total = Scalar(split.fully_open.size()) +
                   Scalar(split.half_open.size()) / Scalar(2);
    for (int c : remaining) total += half.y(c, c);
    if (total > Scalar(k) + tol) {
      std::ostringstream os;
      os << "split_centers: budget invariant broke at " << total;
      split.audit.push_back(os.str());
    }
  };

  audit_budget();
  while (Scalar(remaining.size()) + Scalar(split.fully_open.size()) +
             Scalar(split.half_open.size()) / Scalar(2) >
         Scalar(k)) {
    int chosen = -1;
    for (int c : remaining) {
      if (!(split.a[c] > tol)) continue;  // effectively fully open already
      if (chosen < 0) {
        chosen = c;
        continue;
      }
      Scalar lhs = split.potential[c] * split.a[chosen];
      Scalar rhs = split.potential[chosen] * split.a[c];
      if (lhs < rhs) chosen = c;
    }
    if (chosen < 0)
      throw invariant_violation("split_centers: retirement loop ran out of candidates");

    int best = -1;
    Scalar best_cost{0};
    for (int other : centers) {
      if (other == chosen || !(half.y(chosen, other) > Scalar(0))) continue;
      Scalar cost = replacement_cost(inst, half.y, chosen, other, k);
      if (best < 0 || cost < best_cost) {
        best = other;
        best_cost = cost;
      }
    }
    if (best < 0)
      throw invariant_violation("split_centers: no replacement candidate");
    split.successor[chosen] = best;
    split.half_open.push_back(chosen);
    remaining.erase(std::find(remaining.begin(), remaining.end(), chosen));

    // follow successor links; if the chain ends on a still-retirable
    // center, open it fully so later cycles cannot hold two of them
    std::set<int> seen{chosen};
    int walk = chosen;
    int endpoint = -1;
    while (true) {
      auto it = split.successor.find(walk);
      if (it == split.successor.end()) {
        endpoint = walk;
        break;
      }
      walk = it->second;
      if (seen.count(walk)) break;  // cycle
      seen.insert(walk);
    }
    if (endpoint >= 0) {
      auto it = std::find(remaining.begin(), remaining.end(), endpoint);
      if (it != remaining.end()) {
        remaining.erase(it);
        split.fully_open.push_back(endpoint);
      }
    }
    audit_budget();
  }
  for (int c : remaining) split.fully_open.push_back(c);
  std::sort(split.fully_open.begin(), split.fully_open.end());
  std::sort(split.half_open.begin(), split.half_open.end());
  return split;
}

/// Resolves the successor graph into a final opening set: odd cycles are
/// rewired (shortcut or shortened by one), components are two-colored and
/// the smaller sides open alongside every fully-open center.
template <typename Scalar>
std::vector<int> break_cycles_bipartition(const Instance<Scalar>& inst,
                                          CenterSplit<Scalar>& split) {
  const auto& members = split.half_open;
  std::set<int> half(members.begin(), members.end());
  std::set<int> nearly(split.nearly_open.begin(), split.nearly_open.end());

  // locate the unique cycle of each weakly-connected component
  auto find_cycles = [&]() {
    std::vector<std::vector<int>> cycles;
    std::set<int> on_known_cycle;
    for (int start : members) {
      std::map<int, int> visit_step;
      int walk = start, step = 0;
      while (half.count(walk) && !visit_step.count(walk) &&
             !on_known_cycle.count(walk)) {
        visit_step[walk] = step++;
        auto it = split.successor.find(walk);
        if (it == split.successor.end()) break;
        walk = it->second;
      }
      if (half.count(walk) && visit_step.count(walk)) {
        std::vector<int> cycle;
        int at = walk;
        do {
          cycle.push_back(at);
          at = split.successor.at(at);
        } while (at != walk);
        for (int c : cycle) on_known_cycle.insert(c);
        cycles.push_back(std::move(cycle));
      }
    }
    return cycles;
  };

  for (auto& cycle : find_cycles()) {
    if (cycle.size() % 2 == 0) continue;
    int o_count = 0;
    for (int c : cycle)
      if (nearly.count(c)) ++o_count;
    if (o_count > 1)
      throw invariant_violation("cycle carries more than one nearly-open center");
    // anchor: the nearly-open member if present, else the smallest index
    int anchor = -1;
    for (int c : cycle)
      if (nearly.count(c)) anchor = c;
    if (anchor < 0) anchor = *std::min_element(cycle.begin(), cycle.end());
    auto pos = std::find(cycle.begin(), cycle.end(), anchor) - cycle.begin();
    auto at = [&](long i) {
      long m = static_cast<long>(cycle.size());
      return cycle[((i % m) + m) % m];
    };
    int before = at(pos - 1), before2 = at(pos - 2);
    if (inst.dist(before2, before) <= inst.dist(before, anchor))
      split.successor[before] = before2;  // cycle becomes a tree
    else
      split.successor[before2] = anchor;  // odd cycle shrinks to even
  }

  // two-color the (undirected) successor graph per component
  std::map<int, std::vector<int>> adj;
  for (int c : members) {
    int s = split.successor.at(c);
    if (!half.count(s)) continue;
    adj[c].push_back(s);
    adj[s].push_back(c);
  }
  std::map<int, int> color;
  std::vector<int> opened;
  for (int start : members) {
    if (color.count(start)) continue;
    std::vector<int> side[2], stack{start};
    color[start] = 0;
    side[0].push_back(start);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!color.count(w)) {
          color[w] = color[v] ^ 1;
          side[color[w]].push_back(w);
          stack.push_back(w);
        } else if (color[w] == color[v]) {
          throw invariant_violation("successor graph stayed odd after rewiring");
        }
      }
    }
    std::sort(side[0].begin(), side[0].end());
    std::sort(side[1].begin(), side[1].end());
    int pick = side[0].size() < side[1].size()   ? 0
               : side[1].size() < side[0].size() ? 1
               : (side[0] < side[1] ? 0 : 1);
    for (int c : side[pick]) opened.push_back(c);
  }
  std::sort(opened.begin(), opened.end());
  return opened;
}

/// Builds the assignment restricted to the final center columns: final
/// centers open fully, their columns are scaled just enough to carry the
/// retired nearly-open centers routed to them, then every retired column
/// folds into its successor (entries capped at one).
template <typename Scalar>
FractionalAssignment<Scalar> integralize_centers(
    const Instance<Scalar>& inst, const HalfOpenResult<Scalar>& half,
    const CenterSplit<Scalar>& split, const std::vector<int>& opened_half,
    int k) {
  const int n = inst.n;
  std::set<int> final_set(split.fully_open.begin(), split.fully_open.end());
  for (int c : opened_half) final_set.insert(c);
  if (static_cast<int>(final_set.size()) > k)
    throw invariant_violation("integralize_centers: more than k final centers");

  std::set<int> nearly(split.nearly_open.begin(), split.nearly_open.end());
  std::vector<int> retired;
  for (int c : half.centers)
    if (!final_set.count(c)) retired.push_back(c);
  std::sort(retired.begin(), retired.end());

  const Scalar threshold = Scalar(1) / Scalar(16 * k);
  FractionalAssignment<Scalar> z = FractionalAssignment<Scalar>::Zero(n, n);
  for (int c : final_set) {
    Scalar scale(1);
    for (int r : retired) {
      if (!nearly.count(r) || split.successor.at(r) != c) continue;
      Scalar needed = threshold / half.y(r, c);
      if (needed > scale) scale = needed;
    }
    for (int v = 0; v < n; ++v)
      z(v, c) = std::min(Scalar(1), scale * half.y(v, c));
    z(c, c) = Scalar(1);
  }
  for (int r : retired) {
    int c = split.successor.at(r);
    if (!final_set.count(c))
      throw invariant_violation("integralize_centers: successor was not opened");
    for (int v = 0; v < n; ++v)
      z(v, c) = std::min(Scalar(1), z(v, c) + half.y(v, r));
  }
  return z;
}

template <typename Scalar = double>
struct FindCentersResult {
  AssignmentResult<Scalar> assignment;
  FractionalAssignment<Scalar> relaxation;  // x tilde
  HalfOpenResult<Scalar> half;
  CenterSplit<Scalar> split;
  std::vector<int> opened_half;  // bipartition side that opened
  FractionalAssignment<Scalar> z;
  std::vector<int> final_centers;
};

/// End-to-end center finding: relaxation, half-opening, center splitting,
/// cycle repair, integral openings, then a 16k blow-up and per-center
/// Steiner connection exactly as in the fixed-center pipeline.
template <typename Scalar>
FindCentersResult<Scalar> find_centers(const Instance<Scalar>& inst, int k,
                                       const HalfOpenOptions<Scalar>& options = {}) {
  if (k < 1) throw contract_error("find_centers: k must be >= 1");
  auto lp = solve_flow_center_lp(inst, k);
  if (lp.status == LpStatus::infeasible)
    throw infeasible_error("find_centers: relaxation infeasible");
  if (lp.status != LpStatus::optimal)
    throw solver_error("find_centers: relaxation did not solve");

  FindCentersResult<Scalar> result;
  result.relaxation = lp.x;
  result.half = half_open(inst, lp.x, k, options);
  result.split = split_centers(inst, result.half, k);
  result.opened_half = break_cycles_bipartition(inst, result.split);
  result.z = integralize_centers(inst, result.half, result.split,
                                 result.opened_half, k);

  std::set<int> finals(result.split.fully_open.begin(),
                       result.split.fully_open.end());
  for (int c : result.opened_half) finals.insert(c);
  result.final_centers.assign(finals.begin(), finals.end());

  FractionalAssignment<Scalar> scaled =
      (Scalar(16 * k) * result.z).cwiseMin(Scalar(1));

  result.assignment.lp_value = lp.objective;
  std::vector<char> covered(inst.n, 0);
  for (int c : result.final_centers) {
    std::vector<int> terminals{c};
    for (int v = 0; v < inst.n; ++v)
      if (v != c && scaled(v, c) >= Scalar(1) - Scalar(1e-7))
        terminals.push_back(v);
    std::sort(terminals.begin(), terminals.end());
    for (int t : terminals) covered[t] = 1;
    result.assignment.terminal_sets[c] = terminals;
  }
  for (int v = 0; v < inst.n; ++v)
    if (!covered[v])
      throw invariant_violation("find_centers: blow-up left a node unassigned");
  for (int c : result.final_centers) {
    SteinerInstance<Scalar> steiner{inst.n, inst.edges,
                                    result.assignment.terminal_sets[c],
                                    inst.dist.col(c)};
    auto nodes = node_weighted_steiner(steiner);
    result.assignment.clustering.clusters.push_back(
        make_cluster(c, std::move(nodes)));
  }
  result.assignment.cost = evaluate_cost(inst, result.assignment.clustering);
  return result;
}

}  // namespace ckm
