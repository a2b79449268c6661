#pragma once

#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ckm/instance.hpp"
#include "ckm/rng.hpp"

namespace ckm {

/// CNF with at most three literals per clause. Literals are 1-based and
/// negative for negation, DIMACS style.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

inline CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula cnf;
  std::string line;
  int declared_clauses = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      ls >> p >> fmt >> cnf.num_vars >> declared_clauses;
      if (fmt != "cnf") throw contract_error("dimacs: expected 'p cnf'");
      continue;
    }
    int lit;
    std::vector<int> clause;
    while (ls >> lit) {
      if (lit == 0) {
        if (!clause.empty()) cnf.clauses.push_back(clause);
        clause.clear();
      } else {
        clause.push_back(lit);
      }
    }
    if (!clause.empty()) cnf.clauses.push_back(clause);
  }
  for (const auto& clause : cnf.clauses) {
    if (clause.size() > 3) throw contract_error("dimacs: clause beyond 3-SAT");
    for (int lit : clause)
      if (lit == 0 || std::abs(lit) > cnf.num_vars)
        throw contract_error("dimacs: literal out of range");
  }
  return cnf;
}

inline bool brute_force_satisfiable(const CnfFormula& cnf) {
  if (cnf.num_vars > 24) throw contract_error("sat check: size guard");
  for (unsigned assign = 0; assign < (1u << cnf.num_vars); ++assign) {
    bool ok = true;
    for (const auto& clause : cnf.clauses) {
      bool sat = false;
      for (int lit : clause) {
        bool value = assign >> (std::abs(lit) - 1) & 1u;
        if ((lit > 0) == value) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

/// Index layout of the 3-SAT reduction instance.
struct SatLayout {
  int t = 0, f = 1;
  int a = 0, b = 0, m = 0;
  int pos_lit(int i) const { return 2 + 2 * i; }      // x_i
  int neg_lit(int i) const { return 3 + 2 * i; }      // negated x_i
  int var_copy(int i, int j) const { return 2 + 2 * a + i * m + j; }
  int clause_copy(int i, int j) const {
    return 2 + 2 * a + a * m + i * m + j;
  }
  int n() const { return 2 + (m + 2) * a + m * b; }
};

/// Reduction from 3-SAT to disjoint connected 2-median. Three distance
/// groups: the T side (T and clause copies), the middle literals, and the
/// F side (F and variable copies) at pairwise distances 0 / 1 / 2. An
/// optional epsilon replaces the in-group zeros by a small positive value.
inline Instance<double> gen_from_3sat(const CnfFormula& cnf, int m,
                                      std::optional<double> epsilon = {}) {
  const int a = cnf.num_vars, b = static_cast<int>(cnf.clauses.size());
  // the cost dichotomy needs a, b >= 2; smaller formulas still generate
  if (a < 1 || b < 1)
    throw contract_error("gen_from_3sat: need at least one variable and clause");
  if (m < 1) throw contract_error("gen_from_3sat: m must be positive");
  if (epsilon && !(*epsilon > 0 && *epsilon < 0.5))
    throw contract_error("gen_from_3sat: epsilon must lie in (0, 0.5)");
  SatLayout lay{0, 1, a, b, m};
  const int n = lay.n();

  // group: 0 = T side, 1 = literals, 2 = F side
  std::vector<int> group(n, 1);
  group[lay.t] = 0;
  group[lay.f] = 2;
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < m; ++j) group[lay.clause_copy(i, j)] = 0;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < m; ++j) group[lay.var_copy(i, j)] = 2;

  MatrixX<double> dist(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      int gap = std::abs(group[u] - group[v]);
      double d = gap;
      if (u != v && gap == 0 && epsilon) d = *epsilon;
      dist(u, v) = u == v ? 0.0 : d;
    }

  EdgeList edges;
  for (int i = 0; i < a; ++i) {
    edges.push_back({lay.t, lay.pos_lit(i)});
    edges.push_back({lay.t, lay.neg_lit(i)});
    edges.push_back({lay.f, lay.pos_lit(i)});
    edges.push_back({lay.f, lay.neg_lit(i)});
    for (int j = 0; j < m; ++j) {
      edges.push_back({lay.pos_lit(i), lay.var_copy(i, j)});
      edges.push_back({lay.neg_lit(i), lay.var_copy(i, j)});
    }
  }
  for (int i = 0; i < b; ++i) {
    for (int lit : cnf.clauses[i]) {
      int node = lit > 0 ? lay.pos_lit(lit - 1) : lay.neg_lit(-lit - 1);
      for (int j = 0; j < m; ++j) edges.push_back({node, lay.clause_copy(i, j)});
    }
  }
  // repeated literals in a clause would duplicate edges
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return make_instance<double>(n, std::move(dist), std::move(edges), 2);
}

/// Reduction from dominating set to non-disjoint connected 2-median with
/// the natural center pair {a, b} fixed. Nodes a and all x_i sit at
/// position 0, b and all y_i at position 1.
inline Instance<double> gen_from_dominating_set(int source_n,
                                                const EdgeList& source_edges) {
  if (source_n < 1) throw contract_error("gen_from_dominating_set: empty graph");
  for (const auto& e : source_edges)
    if (e[0] < 0 || e[0] >= source_n || e[1] < 0 || e[1] >= source_n ||
        e[0] == e[1])
      throw contract_error("gen_from_dominating_set: bad source edge");
  const int n = 2 + 2 * source_n;
  auto x_of = [&](int i) { return 2 + i; };
  auto y_of = [&](int i) { return 2 + source_n + i; };

  std::vector<int> pos(n, 0);
  pos[1] = 1;
  for (int i = 0; i < source_n; ++i) pos[y_of(i)] = 1;
  MatrixX<double> dist(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) dist(u, v) = std::abs(pos[u] - pos[v]);

  EdgeList edges;
  for (int i = 0; i < source_n; ++i) {
    edges.push_back({x_of(i), 0});
    edges.push_back({x_of(i), 1});
    edges.push_back({x_of(i), y_of(i)});
  }
  for (const auto& e : source_edges) {
    edges.push_back({x_of(e[0]), y_of(e[1])});
    edges.push_back({x_of(e[1]), y_of(e[0])});
  }
  return make_instance<double>(n, std::move(dist), std::move(edges), 2,
                               std::vector<int>{0, 1});
}

namespace detail {

inline MatrixX<double> plane_metric(int n, std::mt19937_64& rng) {
  // coordinates are rounded so equal instances serialize identically;
  // distances computed from the rounded points stay a metric
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = std::round(uniform_real(rng) * 1000.0) / 1000.0;
    ys[i] = std::round(uniform_real(rng) * 1000.0) / 1000.0;
  }
  MatrixX<double> dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist(i, j) = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);
  return dist;
}

}  // namespace detail

/// Hub-and-spokes connectivity over a random planar metric, k = 2.
inline Instance<double> gen_star(int n, std::uint64_t seed) {
  if (n < 3) throw contract_error("gen_star: need n >= 3");
  std::mt19937_64 rng(seed);
  auto dist = detail::plane_metric(n, rng);
  EdgeList edges;
  for (int v = 1; v < n; ++v) edges.push_back({0, v});
  return make_instance<double>(n, std::move(dist), std::move(edges), 2);
}

enum class GraphModel { gnp, tree, grid };

/// Random instance: connected connectivity graph of the chosen model plus
/// a random planar metric. Deterministic per seed.
inline Instance<double> gen_random(int n, int k, std::uint64_t seed,
                                   GraphModel model = GraphModel::gnp,
                                   double p = 0.5) {
  if (n < 1 || k < 1 || k > n) throw contract_error("gen_random: need n >= k >= 1");
  std::mt19937_64 rng(seed);
  auto dist = detail::plane_metric(n, rng);

  EdgeList edges;
  switch (model) {
    case GraphModel::tree: {
      // uniform random tree from a Pruefer sequence
      if (n == 1) break;
      if (n == 2) {
        edges.push_back({0, 1});
        break;
      }
      std::vector<int> pruefer(n - 2);
      for (auto& v : pruefer) v = uniform_int(rng, 0, n - 1);
      std::vector<int> degree(n, 1);
      for (int v : pruefer) ++degree[v];
      std::vector<char> used(n, 0);
      for (int v : pruefer) {
        int leaf = -1;
        for (int u = 0; u < n; ++u)
          if (degree[u] == 1 && !used[u]) {
            leaf = u;
            break;
          }
        edges.push_back({std::min(leaf, v), std::max(leaf, v)});
        used[leaf] = 1;
        --degree[v];
      }
      std::vector<int> last;
      for (int u = 0; u < n; ++u)
        if (degree[u] == 1 && !used[u]) last.push_back(u);
      edges.push_back({last[0], last[1]});
      break;
    }
    case GraphModel::grid: {
      int w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
      for (int v = 0; v < n; ++v) {
        int r = v / w, c = v % w;
        if (c + 1 < w && v + 1 < n) edges.push_back({v, v + 1});
        if ((r + 1) * w + c < n) edges.push_back({v, v + w});
      }
      break;
    }
    case GraphModel::gnp: {
      const int retry_budget = 1000;
      bool connected = false;
      for (int attempt = 0; attempt < retry_budget && !connected; ++attempt) {
        edges.clear();
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v)
            if (uniform_real(rng) < p) edges.push_back({u, v});
        std::vector<int> all(n);
        for (int v = 0; v < n; ++v) all[v] = v;
        connected = induces_connected(n, edges, all);
      }
      if (!connected)
        throw solver_error("gen_random: gnp stayed disconnected; raise p");
      break;
    }
  }
  return make_instance<double>(n, std::move(dist), std::move(edges), k);
}

}  // namespace ckm
