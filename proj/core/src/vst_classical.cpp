#include "stqaoa/vst_classical.hpp"

#include <cmath>
#include <stdexcept>

#include "stqaoa/rng.hpp"

namespace stqaoa {

namespace {

void check_angles(const DirectedSpanningTree& t, const std::vector<double>& gamma,
                  const std::vector<double>& beta) {
  const std::size_t n_edges = t.edge_order.size();
  if (gamma.size() != n_edges || beta.size() != n_edges)
    throw std::invalid_argument("angle vectors must have one entry per tree edge");
}

// Edge index (position in edge_order) keyed by child vertex.
std::vector<int> edge_index_by_child(const DirectedSpanningTree& t) {
  std::vector<int> idx(t.parent.size(), -1);
  for (std::size_t q = 0; q < t.edge_order.size(); ++q)
    idx[static_cast<std::size_t>(t.edge_order[q].child)] = static_cast<int>(q);
  return idx;
}

std::vector<int> depths(const DirectedSpanningTree& t) {
  std::vector<int> depth(t.parent.size(), -1);
  depth[static_cast<std::size_t>(t.root)] = 0;
  for (const auto& e : t.edge_order)
    depth[static_cast<std::size_t>(e.child)] = depth[static_cast<std::size_t>(e.parent)] + 1;
  return depth;
}

}  // namespace

double vst_zz_expectation(const DirectedSpanningTree& t, const std::vector<double>& gamma,
                          const std::vector<double>& beta, int i, int j) {
  check_angles(t, gamma, beta);
  const int n = static_cast<int>(t.parent.size());
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("vertex out of range");
  if (i == j) throw std::invalid_argument("need two distinct vertices");

  const auto depth = depths(t);
  const auto edge_of = edge_index_by_child(t);

  // Walk both endpoints up to their lowest common ancestor, multiplying the
  // per-edge factors along the way.
  double product = 1.0;
  int a = i;
  int b = j;
  auto step_up = [&](int v) {
    const int q = edge_of[static_cast<std::size_t>(v)];
    product *= std::sin(2.0 * gamma[static_cast<std::size_t>(q)]) *
               std::sin(2.0 * beta[static_cast<std::size_t>(q)]);
    return t.parent[static_cast<std::size_t>(v)];
  };
  while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)]) a = step_up(a);
  while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)]) b = step_up(b);
  while (a != b) {
    a = step_up(a);
    b = step_up(b);
  }
  return product;
}

double vst_objective(const SignedGraph& g, const DirectedSpanningTree& t,
                     const std::vector<double>& gamma, const std::vector<double>& beta) {
  validate_tree(g, t);
  check_angles(t, gamma, beta);
  double acc = 0.0;
  for (const auto& e : g.edges)
    acc += 0.5 * (1.0 + e.sign * vst_zz_expectation(t, gamma, beta, e.u, e.v));
  return acc;
}

std::vector<std::vector<std::uint8_t>> vst_sample(const DirectedSpanningTree& t,
                                                  const std::vector<double>& gamma,
                                                  const std::vector<double>& beta, int k,
                                                  std::uint64_t seed) {
  check_angles(t, gamma, beta);
  if (k < 1) throw std::invalid_argument("need at least one sample");
  const std::size_t n = t.parent.size();

  std::vector<double> flip_probability(t.edge_order.size());
  for (std::size_t q = 0; q < t.edge_order.size(); ++q)
    flip_probability[q] = 0.5 * (1.0 - std::sin(2.0 * gamma[q]) * std::sin(2.0 * beta[q]));

  rng::Rng r(seed);
  std::vector<std::vector<std::uint8_t>> samples;
  samples.reserve(static_cast<std::size_t>(k));
  for (int draw = 0; draw < k; ++draw) {
    std::vector<std::uint8_t> bits(n, 0);
    bits[static_cast<std::size_t>(t.root)] = static_cast<std::uint8_t>(r.below(2));
    for (std::size_t q = 0; q < t.edge_order.size(); ++q) {
      const auto& e = t.edge_order[q];
      const bool flip = r.uniform() < flip_probability[q];
      bits[static_cast<std::size_t>(e.child)] =
          flip ? static_cast<std::uint8_t>(1 - bits[static_cast<std::size_t>(e.parent)])
               : bits[static_cast<std::size_t>(e.parent)];
    }
    samples.push_back(std::move(bits));
  }
  return samples;
}

}  // namespace stqaoa
