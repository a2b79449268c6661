#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckm/generators.hpp"
#include "ckm/oracle.hpp"
#include "test_support.hpp"

using namespace ckm;

namespace {

Instance<double> random_instance(std::mt19937_64& rng, int n, int k,
                                 double p = 0.6) {
  while (true) {
    auto g = test::random_weighted_graph(rng, n, p);
    std::vector<int> all(n);
    for (int v = 0; v < n; ++v) all[v] = v;
    if (!induces_connected(n, g.edges, all)) continue;
    MatrixX<double> dist(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double d = i == j ? 0.0 : std::round(uniform_real(rng) * 50.0) / 10.0;
        dist(i, j) = d;
        dist(j, i) = d;
      }
    return make_instance<double>(n, std::move(dist), g.edges, k, {}, false);
  }
}

Instance<double> permuted(const Instance<double>& inst,
                          const std::vector<int>& perm) {
  MatrixX<double> dist(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) dist(perm[i], perm[j]) = inst.dist(i, j);
  EdgeList edges;
  for (const auto& e : inst.edges) edges.push_back({perm[e[0]], perm[e[1]]});
  return make_instance<double>(inst.n, std::move(dist), std::move(edges),
                               inst.k, {}, false);
}

}  // namespace

TEST_CASE("disjoint oracle basics") {
  SUBCASE("all-zero distances cost nothing") {
    MatrixX<double> dist = MatrixX<double>::Zero(5, 5);
    EdgeList edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    auto inst = make_instance<double>(5, dist, edges, 2);
    CHECK(brute_force_disjoint(inst, 2).cost == 0.0);
  }

  SUBCASE("path with k = 2 splits in the middle") {
    auto inst = test::path_instance(3, 2);
    auto r = brute_force_disjoint(inst, 2);
    CHECK(r.cost == doctest::Approx(1.0));
    CHECK(validate(inst, r.clustering, Variant::disjoint).feasible());
  }

  SUBCASE("disconnected graph with k = 1 is infeasible") {
    MatrixX<double> dist = MatrixX<double>::Zero(2, 2);
    auto inst = make_instance<double>(2, dist, {}, 1);
    CHECK_THROWS_AS(brute_force_disjoint(inst, 1), infeasible_error);
  }

  SUBCASE("size guard is a hard error") {
    auto inst = test::path_instance(11, 3);
    CHECK_THROWS_AS(brute_force_disjoint(inst, 3), contract_error);
  }
}

TEST_CASE("k=2 bounded search agrees with partition enumeration") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 60; ++round) {
    int n = uniform_int(rng, 2, 7);
    auto inst = random_instance(rng, n, 2);
    auto fast = brute_force_disjoint(inst, 2);

    // independent route: canonical set-partition enumeration
    auto nbr = detail::neighbor_masks(inst.n, inst.edges);
    std::vector<int> label(inst.n, 0), best_label;
    std::optional<double> best;
    detail::rgs_descend(inst, nbr, 2, label, 0, 0, best, best_label);
    REQUIRE(best.has_value());
    CAPTURE(round);
    CHECK(fast.cost == doctest::Approx(*best));
    CHECK(validate(inst, fast.clustering, Variant::disjoint).feasible());
    CHECK(evaluate_cost(inst, fast.clustering) == doctest::Approx(fast.cost));
  }
}

TEST_CASE("disjoint oracle with fixed centers") {
  auto inst = test::path_instance(4, 2);
  auto r = brute_force_disjoint(inst, 2, std::vector<int>{0, 3});
  CHECK(r.cost == doctest::Approx(2.0));
  for (const auto& cl : r.clustering.clusters)
    CHECK(std::find(cl.members.begin(), cl.members.end(), cl.center) !=
          cl.members.end());

  // free optimum can only be at most the fixed-centers optimum
  CHECK(brute_force_disjoint(inst, 2).cost <= r.cost + 1e-12);
}

TEST_CASE("satisfiable 3-SAT reduction instance has optimum 2a") {
  // one clause over two variables: negated x1 or x2, with m = 2
  CnfFormula cnf{2, {{-1, 2}}};
  auto inst = gen_from_3sat(cnf, 2);
  auto r = brute_force_disjoint(inst, 2);
  CHECK(r.cost == doctest::Approx(4.0));
  CHECK(validate(inst, r.clustering, Variant::disjoint).feasible());
}

TEST_CASE("non-disjoint oracle basics") {
  SUBCASE("k = n costs nothing") {
    auto inst = test::path_instance(3, 3);
    CHECK(brute_force_non_disjoint(inst, 3).cost == 0.0);
  }

  SUBCASE("never more expensive than the disjoint optimum") {
    std::mt19937_64 rng(102);
    for (int round = 0; round < 40; ++round) {
      int n = uniform_int(rng, 2, 7);
      auto inst = random_instance(rng, n, 2);
      auto loose = brute_force_non_disjoint(inst, 2);
      auto strict = brute_force_disjoint(inst, 2);
      CAPTURE(round);
      CHECK(loose.cost <= strict.cost + 1e-9);
      CHECK(validate(inst, loose.clustering, Variant::non_disjoint).feasible());
    }
  }

  SUBCASE("size guards") {
    auto inst = test::path_instance(8, 2);
    CHECK_THROWS_AS(brute_force_non_disjoint(inst, 2), contract_error);
    CHECK_NOTHROW(brute_force_non_disjoint(inst, 2, std::vector<int>{0, 7}));
  }
}

TEST_CASE("dominating-set reduction matches the dominating set size") {
  SUBCASE("single edge source") {
    auto inst = gen_from_dominating_set(2, {{0, 1}});
    CHECK(inst.n == 6);
    REQUIRE(inst.fixed_centers.has_value());
    auto r = brute_force_non_disjoint(inst, 2, inst.fixed_centers);
    CHECK(r.cost == doctest::Approx(1.0));
    CHECK(brute_force_dominating_set(2, {{0, 1}}) == 1);
  }

  SUBCASE("triangle source") {
    EdgeList tri{{0, 1}, {1, 2}, {0, 2}};
    auto inst = gen_from_dominating_set(3, tri);
    auto r = brute_force_non_disjoint(inst, 2, inst.fixed_centers);
    CHECK(r.cost == doctest::Approx(1.0));
  }

  SUBCASE("edgeless source needs every node") {
    auto inst = gen_from_dominating_set(3, {});
    auto r = brute_force_non_disjoint(inst, 2, inst.fixed_centers);
    CHECK(r.cost == doctest::Approx(3.0));
    CHECK(brute_force_dominating_set(3, {}) == 3);
  }
}

TEST_CASE("dominating set brute force") {
  EdgeList complete{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  CHECK(brute_force_dominating_set(4, complete) == 1);
  EdgeList cycle{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  CHECK(brute_force_dominating_set(4, cycle) == 2);
  EdgeList star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  CHECK(brute_force_dominating_set(5, star) == 1);
}

TEST_CASE("oracle costs are invariant under node relabeling") {
  std::mt19937_64 rng(103);
  for (int round = 0; round < 25; ++round) {
    int n = uniform_int(rng, 3, 6);
    auto inst = random_instance(rng, n, 2);
    std::vector<int> perm(n);
    for (int v = 0; v < n; ++v) perm[v] = v;
    for (int v = n - 1; v > 0; --v)
      std::swap(perm[v], perm[uniform_int(rng, 0, v)]);
    auto shuffled = permuted(inst, perm);
    CAPTURE(round);
    CHECK(brute_force_disjoint(inst, 2).cost ==
          doctest::Approx(brute_force_disjoint(shuffled, 2).cost));
    CHECK(brute_force_non_disjoint(inst, 2).cost ==
          doctest::Approx(brute_force_non_disjoint(shuffled, 2).cost));
  }
}
