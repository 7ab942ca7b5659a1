#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stqaoa/classical_solvers.hpp"
#include "stqaoa/rng.hpp"
#include "stqaoa/signed_graph.hpp"

using namespace stqaoa;

namespace {

SignedGraph connected_cubic(int n, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const auto g = random_regular_graph(n, 3, -1, seed + attempt * 1000);
    if (is_connected(g)) return g;
  }
}

void check_result_consistency(const SignedGraph& g, const SolverResult& res) {
  CHECK(res.cut.value == cut_value(g, res.cut.assignment));
  validate_tree(g, res.tree);
  // The tree spans the satisfied subgraph, so propagating from its root
  // reproduces the cut.
  CHECK(balanced_cut_from_tree(g, res.tree).value == res.cut.value);
}

}  // namespace

TEST_CASE("brute force finds known optima") {
  const auto odd_triangle = make_signed_graph(3, {{0, 1, -1}, {1, 2, -1}, {0, 2, -1}});
  CHECK(solve_brute_force(odd_triangle).cut.value == 2);

  const auto square =
      make_signed_graph(4, {{0, 1, -1}, {1, 2, -1}, {2, 3, -1}, {0, 3, -1}});
  CHECK(solve_brute_force(square).cut.value == 4);

  const auto k4 = make_signed_graph(
      4, {{0, 1, -1}, {0, 2, -1}, {0, 3, -1}, {1, 2, -1}, {1, 3, -1}, {2, 3, -1}});
  CHECK(solve_brute_force(k4).cut.value == 4);

  const auto balanced_mix = make_signed_graph(3, {{0, 1, -1}, {1, 2, -1}, {0, 2, 1}});
  const auto res = solve_brute_force(balanced_mix);
  CHECK(res.cut.value == 3);
  CHECK(res.meta.solver == "brute-force");
  check_result_consistency(balanced_mix, res);
}

TEST_CASE("brute force result matches every explicit assignment") {
  const auto g = connected_cubic(10, 4);
  const auto best = solve_brute_force(g);
  int explicit_best = 0;
  std::vector<std::uint8_t> z(10, 0);
  for (int mask = 0; mask < (1 << 10); ++mask) {
    for (int v = 0; v < 10; ++v) z[static_cast<std::size_t>(v)] = (mask >> v) & 1;
    explicit_best = std::max(explicit_best, cut_value(g, z));
  }
  CHECK(best.cut.value == explicit_best);
  check_result_consistency(g, best);
}

TEST_CASE("brute force refuses graphs beyond the enumeration guard") {
  SignedGraph path;
  path.n_vertices = 29;
  for (int v = 0; v + 1 < 29; ++v) path.edges.push_back({v, v + 1, -1});
  CHECK_THROWS_AS(solve_brute_force(path), std::length_error);
}

TEST_CASE("random tree solver satisfies at least the tree edges") {
  const auto g = connected_cubic(14, 8);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto res = solve_random_tree(g, seed);
    CHECK(res.meta.solver == "rst");
    CHECK(res.meta.seed == seed);
    CHECK(res.cut.value >= g.n_vertices - 1);
    check_result_consistency(g, res);
  }
  CHECK(solve_random_tree(g, 5).cut.assignment == solve_random_tree(g, 5).cut.assignment);
}

TEST_CASE("relaxation solver reaches near-optimal cuts on small graphs") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto g = connected_cubic(10, seed * 13);
    const int optimum = solve_brute_force(g).cut.value;
    const auto res = solve_gw(g, seed);
    CHECK(res.meta.solver == "gw");
    CHECK(res.cut.value <= optimum);
    CHECK(res.cut.value >= 0.878 * optimum);
    check_result_consistency(g, res);
  }
}

TEST_CASE("relaxation solver is seed deterministic and reports its settings") {
  const auto g = connected_cubic(12, 30);
  GwConfig config;
  config.rounding_rounds = 40;
  const auto a = solve_gw(g, 77, config);
  const auto b = solve_gw(g, 77, config);
  CHECK(a.cut.assignment == b.cut.assignment);
  CHECK(a.meta.rounding_rounds == 40);
  CHECK(a.meta.local_search);
  CHECK(a.meta.iterations > 0);
}

TEST_CASE("best-of-k repetitions nest by seed derivation") {
  const auto g = connected_cubic(12, 44);
  const std::uint64_t base = 991;

  const auto best4 = solve_gw_best_of(g, 4, base);
  CHECK(best4.meta.solver == "gw-best-of");
  CHECK(best4.meta.seed == base);
  check_result_consistency(g, best4);

  int manual_best = 0;
  for (int rep = 0; rep < 4; ++rep) {
    const auto one = solve_gw(g, rng::derive(base, {static_cast<std::uint64_t>(rep)}));
    manual_best = std::max(manual_best, one.cut.value);
  }
  CHECK(best4.cut.value == manual_best);
  CHECK(solve_gw_best_of(g, 1, base).cut.value <= best4.cut.value);
  CHECK_THROWS_AS(solve_gw_best_of(g, 0, base), std::invalid_argument);
}
