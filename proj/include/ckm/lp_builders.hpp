#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ckm/cuts.hpp"
#include "ckm/instance.hpp"
#include "ckm/lp.hpp"

namespace ckm {

/// A built program together with the assignment-variable index map;
/// x_var(v,c) is -1 where no variable exists (non-center columns).
template <typename Scalar = double>
struct BuiltLp {
  LinearProgram<Scalar> lp;
  Eigen::MatrixXi x_var;
};

namespace detail {

inline std::string var_name(const char* tag, int v, int c) {
  return std::string(tag) + "_" + std::to_string(v) + "_" + std::to_string(c);
}

// Adds one flow commodity forcing x(v,c) units from v to c: flow leaves v
// with value x(v,c), is conserved at interior nodes and respects their
// assignment to c as a capacity. Endpoint constraints come from the caller
// (the source row self-caps at x(v,c); the target needs an explicit cap
// against the opening when centers are not fixed).
template <typename Scalar>
void add_commodity(LinearProgram<Scalar>& lp, const Instance<Scalar>& inst,
                   const std::vector<std::vector<int>>& adj, int v, int c,
                   int x_vc, const Eigen::MatrixXi& x_var) {
  using Term = typename LinearProgram<Scalar>::Term;
  using Sense = typename LinearProgram<Scalar>::Sense;
  const int n = inst.n;

  // arc variables for both orientations of every edge
  std::map<std::pair<int, int>, int> arc;
  for (const auto& e : inst.edges)
    for (auto [from, to] : {std::pair{e[0], e[1]}, std::pair{e[1], e[0]}}) {
      std::string name = var_name("f", v, c) + "_" + std::to_string(from) +
                         "_" + std::to_string(to);
      arc[{from, to}] = lp.add_variable(std::move(name));
    }

  auto out_arcs = [&](int u) {
    std::vector<Term> terms;
    for (int w : adj[u]) terms.push_back({arc[{u, w}], Scalar(1)});
    return terms;
  };
  auto in_arcs = [&](int u) {
    std::vector<Term> terms;
    for (int w : adj[u]) terms.push_back({arc[{w, u}], Scalar(1)});
    return terms;
  };

  // source emits exactly the assignment value, net of anything routed
  // back into it (a gross-outflow row would admit source-side
  // circulations that never reach the target)
  auto source = out_arcs(v);
  for (auto t : in_arcs(v)) source.push_back({t.var, -t.coeff});
  source.push_back({x_vc, Scalar(-1)});
  lp.add_row(std::move(source), Sense::eq, Scalar(0));

  for (int u = 0; u < n; ++u) {
    if (u == v || u == c) continue;
    auto balance = in_arcs(u);
    for (auto t : out_arcs(u)) balance.push_back({t.var, -t.coeff});
    lp.add_row(std::move(balance), Sense::eq, Scalar(0));
    auto capacity = in_arcs(u);
    capacity.push_back({x_var(u, c), Scalar(-1)});
    lp.add_row(std::move(capacity), Sense::le, Scalar(0));
  }
}

}  // namespace detail

/// Polynomial flow formulation of the assignment relaxation: columns for
/// the given centers only, fixed openings, coverage, and one flow commodity
/// per (node, center) pair.
template <typename Scalar>
BuiltLp<Scalar> build_flow_assignment_lp(const Instance<Scalar>& inst,
                                         const std::vector<int>& centers) {
  using Term = typename LinearProgram<Scalar>::Term;
  using Sense = typename LinearProgram<Scalar>::Sense;
  if (centers.empty())
    throw contract_error("flow assignment lp: centers must be non-empty");

  BuiltLp<Scalar> built;
  built.x_var = Eigen::MatrixXi::Constant(inst.n, inst.n, -1);
  auto& lp = built.lp;
  auto adj = adjacency(inst.n, inst.edges);

  for (int c : centers)
    for (int v = 0; v < inst.n; ++v) {
      built.x_var(v, c) = lp.add_variable(detail::var_name("x", v, c), Scalar(1));
      lp.add_objective(built.x_var(v, c), inst.dist(v, c));
    }
  for (int c : centers)
    lp.add_row({{built.x_var(c, c), Scalar(1)}}, Sense::eq, Scalar(1));
  for (int v = 0; v < inst.n; ++v) {
    std::vector<Term> cover;
    for (int c : centers) cover.push_back({built.x_var(v, c), Scalar(1)});
    lp.add_row(std::move(cover), Sense::ge, Scalar(1));
  }
  for (int c : centers)
    for (int v = 0; v < inst.n; ++v)
      if (v != c)
        detail::add_commodity(lp, inst, adj, v, c, built.x_var(v, c),
                              built.x_var);
  return built;
}

/// Flow formulation of the center relaxation: every node is a potential
/// center, openings are budgeted by k, and assignments are explicitly
/// capped by the target opening (the one cut the flow rows cannot see).
template <typename Scalar>
BuiltLp<Scalar> build_flow_center_lp(const Instance<Scalar>& inst, int k) {
  using Term = typename LinearProgram<Scalar>::Term;
  using Sense = typename LinearProgram<Scalar>::Sense;
  if (k < 1) throw contract_error("flow center lp: k must be >= 1");

  BuiltLp<Scalar> built;
  built.x_var = Eigen::MatrixXi::Constant(inst.n, inst.n, -1);
  auto& lp = built.lp;
  auto adj = adjacency(inst.n, inst.edges);

  for (int c = 0; c < inst.n; ++c)
    for (int v = 0; v < inst.n; ++v) {
      built.x_var(v, c) = lp.add_variable(detail::var_name("x", v, c), Scalar(1));
      lp.add_objective(built.x_var(v, c), inst.dist(v, c));
    }
  for (int v = 0; v < inst.n; ++v) {
    std::vector<Term> cover;
    for (int c = 0; c < inst.n; ++c) cover.push_back({built.x_var(v, c), Scalar(1)});
    lp.add_row(std::move(cover), Sense::ge, Scalar(1));
  }
  std::vector<Term> budget;
  for (int c = 0; c < inst.n; ++c) budget.push_back({built.x_var(c, c), Scalar(1)});
  lp.add_row(std::move(budget), Sense::le, Scalar(k));
  for (int c = 0; c < inst.n; ++c)
    for (int v = 0; v < inst.n; ++v) {
      if (v == c) continue;
      lp.add_row({{built.x_var(v, c), Scalar(1)}, {built.x_var(c, c), Scalar(-1)}},
                 Sense::le, Scalar(0));
      detail::add_commodity(lp, inst, adj, v, c, built.x_var(v, c), built.x_var);
    }
  return built;
}

template <typename Scalar = double>
struct LpAssignmentResult {
  FractionalAssignment<Scalar> x;
  Scalar objective{0};
  LpStatus status = LpStatus::infeasible;
};

template <typename Scalar>
LpAssignmentResult<Scalar> extract_assignment(const BuiltLp<Scalar>& built,
                                              const LpSolution<Scalar>& sol,
                                              int n) {
  LpAssignmentResult<Scalar> out;
  out.status = sol.status;
  out.x = FractionalAssignment<Scalar>::Zero(n, n);
  if (sol.status != LpStatus::optimal) return out;
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < n; ++c)
      if (built.x_var(v, c) >= 0) out.x(v, c) = sol.values[built.x_var(v, c)];
  out.objective = sol.objective_value;
  return out;
}

template <typename Scalar>
LpAssignmentResult<Scalar> solve_flow_assignment_lp(
    const Instance<Scalar>& inst, const std::vector<int>& centers) {
  auto built = build_flow_assignment_lp(inst, centers);
  return extract_assignment(built, solve_lp(built.lp), inst.n);
}

template <typename Scalar>
LpAssignmentResult<Scalar> solve_flow_center_lp(const Instance<Scalar>& inst,
                                                int k) {
  auto built = build_flow_center_lp(inst, k);
  return extract_assignment(built, solve_lp(built.lp), inst.n);
}

template <typename Scalar = double>
struct CutLpResult {
  FractionalAssignment<Scalar> x;
  Scalar objective{0};
  LpStatus status = LpStatus::infeasible;
  int rows_added = 0;
  int rounds = 0;
};

/// Cutting-plane solve of the separator formulation. Starts from coverage
/// (plus budget or fixed openings), then alternates solving and adding the
/// most violated vertex-cut rows found by the min-cut separation oracle
/// until the returned point is feasible for every cut constraint.
template <typename Scalar>
CutLpResult<Scalar> solve_cut_lp(const Instance<Scalar>& inst,
                                 std::optional<std::vector<int>> centers,
                                 int k, Scalar sep_tol = Scalar(1e-7),
                                 int row_cap = 0) {
  using Term = typename LinearProgram<Scalar>::Term;
  using Sense = typename LinearProgram<Scalar>::Sense;
  const int n = inst.n;
  if (row_cap <= 0) row_cap = 10 * n * n * n;

  std::vector<int> columns;
  if (centers) {
    if (centers->empty())
      throw contract_error("cut lp: centers must be non-empty");
    columns = *centers;
  } else {
    columns.resize(n);
    for (int c = 0; c < n; ++c) columns[c] = c;
  }

  // accumulated cut rows, kept as (column, cut nodes, bounded node)
  struct CutRow {
    int c;
    std::vector<int> cut;
    int v;
  };
  std::vector<CutRow> cut_rows;
  std::set<std::pair<std::pair<int, int>, std::vector<int>>> seen;

  CutLpResult<Scalar> result;
  while (true) {
    LinearProgram<Scalar> lp;
    Eigen::MatrixXi x_var = Eigen::MatrixXi::Constant(n, n, -1);
    for (int c : columns)
      for (int v = 0; v < n; ++v) {
        x_var(v, c) = lp.add_variable(detail::var_name("x", v, c), Scalar(1));
        lp.add_objective(x_var(v, c), inst.dist(v, c));
      }
    if (centers) {
      for (int c : columns)
        lp.add_row({{x_var(c, c), Scalar(1)}}, Sense::eq, Scalar(1));
    } else {
      std::vector<Term> budget;
      for (int c : columns) budget.push_back({x_var(c, c), Scalar(1)});
      lp.add_row(std::move(budget), Sense::le, Scalar(k));
    }
    for (int v = 0; v < n; ++v) {
      std::vector<Term> cover;
      for (int c : columns) cover.push_back({x_var(v, c), Scalar(1)});
      lp.add_row(std::move(cover), Sense::ge, Scalar(1));
    }
    for (const auto& row : cut_rows) {
      std::vector<Term> terms{{x_var(row.v, row.c), Scalar(-1)}};
      for (int u : row.cut) terms.push_back({x_var(u, row.c), Scalar(1)});
      lp.add_row(std::move(terms), Sense::ge, Scalar(0));
    }

    auto sol = solve_lp(lp);
    ++result.rounds;
    if (sol.status != LpStatus::optimal) {
      result.status = sol.status;
      return result;
    }

    FractionalAssignment<Scalar> x = FractionalAssignment<Scalar>::Zero(n, n);
    for (int c : columns)
      for (int v = 0; v < n; ++v) x(v, c) = sol.values[x_var(v, c)];

    int violated = 0, found = 0;
    for (int c : columns) {
      VectorX<Scalar> weights = x.col(c);
      for (int v = 0; v < n; ++v) {
        if (v == c || !(x(v, c) > sep_tol)) continue;
        CutQuery<Scalar> q{n, inst.edges, weights, {v}, {c}};
        auto cut = sep(q);
        if (cut.value < x(v, c) - sep_tol) {
          ++violated;
          auto key = std::pair{std::pair{c, v}, cut.cut_nodes};
          if (seen.insert(key).second) {
            cut_rows.push_back({c, cut.cut_nodes, v});
            ++found;
          }
        }
      }
    }
    if (violated > 0 && found == 0)
      throw solver_error("cut lp: separation stalled on known rows");
    if (found == 0) {
      result.x = std::move(x);
      result.objective = sol.objective_value;
      result.status = LpStatus::optimal;
      result.rows_added = static_cast<int>(cut_rows.size());
      return result;
    }
    if (static_cast<int>(cut_rows.size()) > row_cap)
      throw solver_error("cut lp: row cap exceeded");
  }
}

}  // namespace ckm
