#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stqaoa/quantum_sim.hpp"
#include "stqaoa/rng.hpp"
#include "stqaoa/signed_graph.hpp"
#include "stqaoa/vst_classical.hpp"

using namespace stqaoa;

namespace {

constexpr double kPi = std::numbers::pi;

SignedGraph connected_cubic(int n, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const auto g = random_regular_graph(n, 3, -1, seed + attempt * 1000);
    if (is_connected(g)) return g;
  }
}

std::pair<std::vector<double>, std::vector<double>> random_angles(int n_edges, rng::Rng& r) {
  std::vector<double> gamma(static_cast<std::size_t>(n_edges)), beta(gamma);
  for (auto& x : gamma) x = r.uniform(-kPi, kPi);
  for (auto& x : beta) x = r.uniform(-kPi, kPi);
  return {gamma, beta};
}

}  // namespace

TEST_CASE("pair correlation on a single tree edge is the sine product") {
  const auto g = make_signed_graph(2, {{0, 1, -1}});
  const auto t = random_spanning_tree(g, 1);
  for (double gamma : {0.2, 0.9, -1.3})
    for (double beta : {0.1, -0.7}) {
      const double want = std::sin(2 * gamma) * std::sin(2 * beta);
      CHECK(std::abs(vst_zz_expectation(t, {gamma}, {beta}, 0, 1) - want) < 1e-14);
      CHECK(vst_zz_expectation(t, {gamma}, {beta}, 1, 0) ==
            doctest::Approx(vst_zz_expectation(t, {gamma}, {beta}, 0, 1)));
    }
  CHECK_THROWS_AS(vst_zz_expectation(t, {0.1}, {0.2}, 1, 1), std::invalid_argument);
}

TEST_CASE("closed-form objective equals statevector evaluation") {
  rng::Rng r(71);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + trial % 7;
    const auto g = connected_cubic(n % 2 == 0 ? n : n + 1, 50 + static_cast<std::uint64_t>(trial));
    const auto t = random_spanning_tree(g, static_cast<std::uint64_t>(trial) + 7);
    const auto [gamma, beta] = random_angles(g.n_vertices - 1, r);

    std::vector<double> params = gamma;
    params.insert(params.end(), beta.begin(), beta.end());
    const double direct = evaluate(build_vst_circuit(t), params, g);
    CHECK(std::abs(vst_objective(g, t, gamma, beta) - direct) < 1e-10);
  }
}

TEST_CASE("objective at the fixed-angle point equals the tree cut value") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto g = connected_cubic(10, seed * 31);
    const auto t = random_spanning_tree(g, seed);
    const int n_edges = g.n_vertices - 1;
    std::vector<double> gamma(static_cast<std::size_t>(n_edges)), beta(static_cast<std::size_t>(n_edges), kPi / 4);
    for (int q = 0; q < n_edges; ++q)
      gamma[static_cast<std::size_t>(q)] = t.edge_order[static_cast<std::size_t>(q)].sign * kPi / 4;
    const auto cut = balanced_cut_from_tree(g, t);
    CHECK(std::abs(vst_objective(g, t, gamma, beta) - cut.value) < 1e-12);
  }
}

TEST_CASE("objective validates angle vector lengths") {
  const auto g = connected_cubic(8, 5);
  const auto t = random_spanning_tree(g, 2);
  const std::vector<double> good(7, 0.1), bad(6, 0.1);
  CHECK_NOTHROW(vst_objective(g, t, good, good));
  CHECK_THROWS_AS(vst_objective(g, t, bad, good), std::invalid_argument);
  CHECK_THROWS_AS(vst_objective(g, t, good, bad), std::invalid_argument);
}

TEST_CASE("sampler is seed deterministic and honors zero-variance angles") {
  const auto g = connected_cubic(8, 19);
  const auto t = random_spanning_tree(g, 6);
  const int n_edges = g.n_vertices - 1;

  std::vector<double> gamma(static_cast<std::size_t>(n_edges)), beta(static_cast<std::size_t>(n_edges), kPi / 4);
  for (int q = 0; q < n_edges; ++q)
    gamma[static_cast<std::size_t>(q)] = t.edge_order[static_cast<std::size_t>(q)].sign * kPi / 4;

  const auto draws = vst_sample(t, gamma, beta, 64, 17);
  REQUIRE(draws.size() == 64);
  const auto cut = balanced_cut_from_tree(g, t);
  for (const auto& z : draws) CHECK(cut_value(g, z) == cut.value);
  CHECK(vst_sample(t, gamma, beta, 64, 17) == draws);
  CHECK(vst_sample(t, gamma, beta, 64, 18) != draws);
}

TEST_CASE("empirical pair correlations track the closed form") {
  const auto g = make_signed_graph(3, {{0, 1, -1}, {1, 2, -1}});
  DirectedSpanningTree t;
  t.root = 0;
  t.parent = {-1, 0, 1};
  t.parent_sign = {0, -1, -1};
  t.edge_order = {{0, 1, -1}, {1, 2, -1}};
  validate_tree(g, t);

  const std::vector<double> gamma{0.4, -0.9}, beta{0.7, 0.3};
  const int samples = 20000;
  const auto draws = vst_sample(t, gamma, beta, samples, 23);

  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      double acc = 0.0;
      for (const auto& z : draws) {
        const int si = z[static_cast<std::size_t>(i)] ? -1 : 1;
        const int sj = z[static_cast<std::size_t>(j)] ? -1 : 1;
        acc += si * sj;
      }
      const double lambda = vst_zz_expectation(t, gamma, beta, i, j);
      const double sd = std::sqrt((1.0 - lambda * lambda) / samples);
      CHECK(std::abs(acc / samples - lambda) < 4.0 * sd + 1e-12);
    }
}
