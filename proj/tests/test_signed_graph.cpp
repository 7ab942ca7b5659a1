#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stqaoa/signed_graph.hpp"

using namespace stqaoa;

namespace {

SignedGraph triangle(int s01 = -1, int s12 = -1, int s02 = -1) {
  return make_signed_graph(3, {{0, 1, s01}, {1, 2, s12}, {0, 2, s02}});
}

}  // namespace

TEST_CASE("validate_graph rejects malformed graphs") {
  CHECK_NOTHROW(validate_graph(triangle()));
  CHECK_THROWS_AS(make_signed_graph(2, {{0, 0, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_signed_graph(2, {{0, 2, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_signed_graph(2, {{-1, 0, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_signed_graph(2, {{0, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_signed_graph(2, {{0, 1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_signed_graph(3, {{0, 1, -1}, {1, 0, -1}}), std::invalid_argument);
}

TEST_CASE("cut_value counts satisfied edges by sign") {
  const auto g = triangle();
  CHECK(cut_value(g, {0, 0, 0}) == 0);
  CHECK(cut_value(g, {0, 0, 1}) == 2);
  CHECK(cut_value(g, {0, 1, 0}) == 2);

  // A +1 edge wants both endpoints on the same side.
  const auto mixed = make_signed_graph(3, {{0, 1, -1}, {1, 2, 1}});
  CHECK(cut_value(mixed, {0, 1, 1}) == 2);
  CHECK(cut_value(mixed, {0, 1, 0}) == 1);
  CHECK(cut_value(mixed, {0, 0, 0}) == 1);

  CHECK_THROWS_AS(cut_value(g, {0, 1}), std::invalid_argument);
}

TEST_CASE("is_balanced detects satisfiable sign patterns") {
  CHECK_FALSE(is_balanced(triangle()).has_value());
  CHECK_FALSE(is_balanced(triangle(-1, 1, 1)).has_value());

  const auto two_neg = is_balanced(triangle(-1, -1, 1));
  REQUIRE(two_neg.has_value());
  CHECK(two_neg->value == 3);

  const auto square =
      make_signed_graph(4, {{0, 1, -1}, {1, 2, -1}, {2, 3, -1}, {0, 3, -1}});
  const auto sq = is_balanced(square);
  REQUIRE(sq.has_value());
  CHECK(sq->value == 4);

  // Forest propagation also covers disconnected graphs.
  const auto disjoint = make_signed_graph(4, {{0, 1, -1}, {2, 3, -1}});
  const auto dj = is_balanced(disjoint);
  REQUIRE(dj.has_value());
  CHECK(dj->value == 2);
}

TEST_CASE("balanced_cut_from_tree satisfies every tree edge") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = random_regular_graph(12, 3, -1, seed);
    if (!is_connected(g)) continue;
    const auto t = random_spanning_tree(g, seed + 100);
    validate_tree(g, t);
    const auto cut = balanced_cut_from_tree(g, t);
    CHECK(cut.value == cut_value(g, cut.assignment));
    for (const auto& e : t.edge_order) {
      const bool same = cut.assignment[static_cast<std::size_t>(e.parent)] ==
                        cut.assignment[static_cast<std::size_t>(e.child)];
      CHECK(same == (e.sign == 1));
    }
  }
}

TEST_CASE("tree_from_cut reproduces the cut when its satisfied subgraph connects") {
  const auto g = triangle();
  const auto [cut, tree] = tree_from_cut(g, make_cut(g, {0, 0, 1}));
  validate_tree(g, tree);
  CHECK(cut.value == 2);
  CHECK(balanced_cut_from_tree(g, tree).value == 2);
}

TEST_CASE("tree_from_cut repairs disconnected satisfied subgraphs by flipping") {
  // z = 0101 satisfies only the two vertical edges of this 4-cycle; flipping
  // the {2,3} component rescues both horizontal edges.
  const auto g = make_signed_graph(4, {{0, 1, -1}, {2, 3, -1}, {0, 2, -1}, {1, 3, -1}});
  const auto z = make_cut(g, {0, 1, 0, 1});
  REQUIRE(z.value == 2);
  const auto [cut, tree] = tree_from_cut(g, z);
  validate_tree(g, tree);
  CHECK(cut.value == 4);
  CHECK(balanced_cut_from_tree(g, tree).value == 4);
}

TEST_CASE("tree_from_cut requires a connected graph") {
  const auto g = make_signed_graph(4, {{0, 1, -1}, {2, 3, -1}});
  CHECK_THROWS_AS(tree_from_cut(g, make_cut(g, {0, 1, 0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(random_spanning_tree(g, 1), std::invalid_argument);
}

TEST_CASE("random_spanning_tree yields valid reproducible trees") {
  const auto g = random_regular_graph(14, 3, -1, 3);
  REQUIRE(is_connected(g));
  const auto t1 = random_spanning_tree(g, 17);
  const auto t2 = random_spanning_tree(g, 17);
  validate_tree(g, t1);
  CHECK(t1.root == t2.root);
  CHECK(t1.parent == t2.parent);
  CHECK(static_cast<int>(t1.edge_order.size()) == g.n_vertices - 1);
}

TEST_CASE("random_regular_graph emits simple d-regular graphs") {
  const auto g = random_regular_graph(16, 3, -1, 9);
  validate_graph(g);
  CHECK(static_cast<int>(g.edges.size()) == 16 * 3 / 2);
  std::vector<int> degree(16, 0);
  for (const auto& e : g.edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
    CHECK(e.sign == -1);
  }
  for (int d : degree) CHECK(d == 3);

  const auto h = random_regular_graph(16, 3, -1, 9);
  CHECK(write_graph(g) == write_graph(h));

  CHECK_THROWS_AS(random_regular_graph(5, 3, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular_graph(4, 4, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular_graph(4, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("graph text round-trips byte for byte") {
  const auto g = random_regular_graph(10, 3, -1, 21);
  const auto text = write_graph(g);
  const auto parsed = read_graph(text);
  CHECK(write_graph(parsed) == text);
  CHECK(parsed.n_vertices == g.n_vertices);
  CHECK(parsed.edges.size() == g.edges.size());

  CHECK_THROWS_AS(read_graph(""), std::runtime_error);
  CHECK_THROWS_AS(read_graph("nonsense"), std::runtime_error);
  CHECK_THROWS_AS(read_graph("2 1\n0 5 -1\n"), std::invalid_argument);
  CHECK_THROWS_AS(read_graph("2 2\n0 1 -1\n"), std::runtime_error);
}

TEST_CASE("graph files round-trip through disk") {
  const auto g = triangle(-1, 1, -1);
  const auto path = std::filesystem::temp_directory_path() / "stqaoa_graph_rt.txt";
  write_graph_file(g, path.string());
  const auto back = read_graph_file(path.string());
  CHECK(write_graph(back) == write_graph(g));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_graph_file((path / "missing").string()), std::runtime_error);
}

TEST_CASE("validate_tree rejects structural mismatches") {
  const auto g = triangle();
  auto t = random_spanning_tree(g, 4);

  auto wrong_sign = t;
  wrong_sign.edge_order[0].sign = -wrong_sign.edge_order[0].sign;
  wrong_sign.parent_sign[static_cast<std::size_t>(wrong_sign.edge_order[0].child)] =
      wrong_sign.edge_order[0].sign;
  CHECK_THROWS_AS(validate_tree(g, wrong_sign), std::invalid_argument);

  auto reordered = t;
  std::swap(reordered.edge_order[0], reordered.edge_order[1]);
  const bool child_first = reordered.edge_order[0].parent == t.edge_order[0].child;
  if (child_first) CHECK_THROWS_AS(validate_tree(g, reordered), std::invalid_argument);

  auto truncated = t;
  truncated.edge_order.pop_back();
  CHECK_THROWS_AS(validate_tree(g, truncated), std::invalid_argument);
}
