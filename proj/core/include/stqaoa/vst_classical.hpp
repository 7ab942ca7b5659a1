#pragma once

#include <cstdint>
#include <vector>

#include "stqaoa/signed_graph.hpp"

namespace stqaoa {

// Closed-form evaluation and sampling of the variational tree ansatz. Angle
// vectors are indexed by t.edge_order position, matching build_vst_circuit's
// parameter layout (gammas are slots [0, n-1), betas slots [n-1, 2n-2)).

// <sz_i sz_j> of the ansatz output: the product over the i-j tree path of
// sin(2*gamma_q)*sin(2*beta_q). Throws std::invalid_argument for i = j.
double vst_zz_expectation(const DirectedSpanningTree& t, const std::vector<double>& gamma,
                          const std::vector<double>& beta, int i, int j);

// Expected satisfied-edge count over all graph edges via tree-path products.
double vst_objective(const SignedGraph& g, const DirectedSpanningTree& t,
                     const std::vector<double>& gamma, const std::vector<double>& beta);

// k exact samples from the ansatz output distribution by root-to-leaf
// ancestral sampling: the root bit is unbiased, and each child differs from
// its parent with probability (1 - sin(2*gamma_q)*sin(2*beta_q))/2. Runs in
// O(n) per sample.
std::vector<std::vector<std::uint8_t>> vst_sample(const DirectedSpanningTree& t,
                                                  const std::vector<double>& gamma,
                                                  const std::vector<double>& beta, int k,
                                                  std::uint64_t seed);

}  // namespace stqaoa
