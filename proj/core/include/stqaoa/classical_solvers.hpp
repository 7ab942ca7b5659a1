#pragma once

#include <cstdint>
#include <string>

#include "stqaoa/signed_graph.hpp"

namespace stqaoa {

// Settings for the low-rank relaxation solver behind solve_gw.
struct GwConfig {
  int rank = 0;                 // 0 picks ceil(sqrt(2n)) + 1
  int max_iterations = 5000;
  double grad_tolerance = 1e-8;
  int rounding_rounds = 100;
  bool local_search = true;
};

struct SolverMeta {
  std::string solver;
  std::uint64_t seed = 0;
  int iterations = 0;
  int rounding_rounds = 0;
  bool local_search = false;
  bool converged = true;        // false flags ascent that hit max_iterations
  double wall_seconds = 0.0;    // informational only; never serialized
};

// A cut together with a spanning tree of its satisfied subgraph, i.e. a valid
// tree_from_cut output; the cut satisfies every tree edge.
struct SolverResult {
  Cut cut;
  DirectedSpanningTree tree;
  SolverMeta meta;
};

// Exact maximum by enumeration over 2^(n-1) assignments (vertex 0 fixed to 0).
// Throws std::length_error above 28 vertices.
SolverResult solve_brute_force(const SignedGraph& g);

// Random spanning tree, its induced all-tree-edges-satisfied cut, then
// tree_from_cut. Guarantees at least n-1 satisfied edges.
SolverResult solve_random_tree(const SignedGraph& g, std::uint64_t seed);

// Relaxation to unit vectors maximizing sum (1 - sign*<x_u, x_v>)/2, solved by
// low-rank factorization with Riemannian gradient ascent (step halved on
// non-improvement, stop at grad_tolerance or max_iterations), followed by
// config.rounding_rounds random-hyperplane roundings keeping the best cut,
// one pass of single-vertex flip local search, and tree_from_cut.
SolverResult solve_gw(const SignedGraph& g, std::uint64_t seed, const GwConfig& config = {});

// Best of k independent solve_gw repetitions. Repetition seeds are derived
// from (seed, repetition index), so seed sets nest: larger k never loses to
// smaller k under the same seed.
SolverResult solve_gw_best_of(const SignedGraph& g, int k, std::uint64_t seed,
                              const GwConfig& config = {});

}  // namespace stqaoa
