#include "stqaoa/classical_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stqaoa/rng.hpp"

namespace stqaoa {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<std::vector<std::pair<int, int>>> incident_edges(const SignedGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> inc(static_cast<std::size_t>(g.n_vertices));
  for (const auto& e : g.edges) {
    inc[static_cast<std::size_t>(e.u)].push_back({e.v, e.sign});
    inc[static_cast<std::size_t>(e.v)].push_back({e.u, e.sign});
  }
  return inc;
}

// One ascending sweep of single-vertex flips, taking any flip that increases
// the number of satisfied edges.
void local_search_sweep(const SignedGraph& g, std::vector<std::uint8_t>& assignment) {
  const auto inc = incident_edges(g);
  for (int v = 0; v < g.n_vertices; ++v) {
    int gain = 0;
    for (const auto& [w, sign] : inc[static_cast<std::size_t>(v)]) {
      const int satisfied =
          sign * (assignment[static_cast<std::size_t>(v)] == assignment[static_cast<std::size_t>(w)]
                      ? 1
                      : -1);
      gain -= satisfied;  // flipping v toggles every incident edge
    }
    if (gain > 0)
      assignment[static_cast<std::size_t>(v)] ^= 1;
  }
}

}  // namespace

SolverResult solve_brute_force(const SignedGraph& g) {
  validate_graph(g);
  if (g.n_vertices > 28) throw std::length_error("brute force is capped at 28 vertices");
  const double t0 = now_seconds();

  const int n = g.n_vertices;
  const std::uint64_t count = 1ULL << (n - 1);  // vertex 0 fixed to side 0
  std::vector<std::uint8_t> assignment(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> best = assignment;
  int best_value = -1;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int v = 1; v < n; ++v)
      assignment[static_cast<std::size_t>(v)] =
          static_cast<std::uint8_t>((mask >> (v - 1)) & 1ULL);
    const int value = cut_value(g, assignment);
    if (value > best_value) {
      best_value = value;
      best = assignment;
    }
  }

  auto [cut, tree] = tree_from_cut(g, Cut{best, best_value});
  SolverResult out{std::move(cut), std::move(tree), {}};
  out.meta.solver = "brute-force";
  out.meta.wall_seconds = now_seconds() - t0;
  return out;
}

SolverResult solve_random_tree(const SignedGraph& g, std::uint64_t seed) {
  const double t0 = now_seconds();
  const DirectedSpanningTree t = random_spanning_tree(g, seed);
  const Cut z = balanced_cut_from_tree(g, t);
  auto [cut, tree] = tree_from_cut(g, z);
  SolverResult out{std::move(cut), std::move(tree), {}};
  out.meta.solver = "rst";
  out.meta.seed = seed;
  out.meta.wall_seconds = now_seconds() - t0;
  return out;
}

SolverResult solve_gw(const SignedGraph& g, std::uint64_t seed, const GwConfig& config) {
  validate_graph(g);
  if (config.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (config.rounding_rounds < 1) throw std::invalid_argument("need at least one rounding round");
  if (config.rank < 0) throw std::invalid_argument("rank must be >= 0");
  const double t0 = now_seconds();

  const int n = g.n_vertices;
  const int rank =
      config.rank > 0 ? config.rank : static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1;
  rng::Rng r(seed);

  // Row v of x holds vertex v's unit vector.
  std::vector<double> x(static_cast<std::size_t>(n) * rank);
  auto row = [&x, rank](int v) { return x.data() + static_cast<std::size_t>(v) * rank; };
  auto normalize_row = [rank](double* p) {
    double norm_sq = 0.0;
    for (int c = 0; c < rank; ++c) norm_sq += p[c] * p[c];
    if (norm_sq < 1e-300) {
      p[0] = 1.0;
      for (int c = 1; c < rank; ++c) p[c] = 0.0;
      return;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int c = 0; c < rank; ++c) p[c] *= inv;
  };
  for (int v = 0; v < n; ++v) {
    for (int c = 0; c < rank; ++c) row(v)[c] = r.normal();
    normalize_row(row(v));
  }

  auto relaxed_objective = [&](const std::vector<double>& vecs) {
    double acc = 0.0;
    for (const auto& e : g.edges) {
      const double* pu = vecs.data() + static_cast<std::size_t>(e.u) * rank;
      const double* pv = vecs.data() + static_cast<std::size_t>(e.v) * rank;
      double dot = 0.0;
      for (int c = 0; c < rank; ++c) dot += pu[c] * pv[c];
      acc += 0.5 * (1.0 + e.sign * dot);
    }
    return acc;
  };

  // Projected gradient ascent on the product of unit spheres.
  double value = relaxed_objective(x);
  double step = 1.0;
  int iterations = 0;
  bool converged = config.max_iterations == 0;
  std::vector<double> grad(x.size());
  std::vector<double> trial(x.size());
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& e : g.edges) {
      double* gu = grad.data() + static_cast<std::size_t>(e.u) * rank;
      double* gv = grad.data() + static_cast<std::size_t>(e.v) * rank;
      const double* pu = row(e.u);
      const double* pv = row(e.v);
      for (int c = 0; c < rank; ++c) {
        gu[c] += e.sign * pv[c];
        gv[c] += e.sign * pu[c];
      }
    }
    double grad_norm_sq = 0.0;
    for (int v = 0; v < n; ++v) {
      double* gv = grad.data() + static_cast<std::size_t>(v) * rank;
      const double* pv = row(v);
      double dot = 0.0;
      for (int c = 0; c < rank; ++c) dot += gv[c] * pv[c];
      for (int c = 0; c < rank; ++c) {
        gv[c] -= dot * pv[c];  // project onto the sphere's tangent space
        grad_norm_sq += gv[c] * gv[c];
      }
    }
    if (std::sqrt(grad_norm_sq) <= config.grad_tolerance) {
      converged = true;
      break;
    }

    iterations = iter + 1;
    trial = x;
    for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += step * grad[k];
    for (int v = 0; v < n; ++v) normalize_row(trial.data() + static_cast<std::size_t>(v) * rank);
    const double trial_value = relaxed_objective(trial);
    if (trial_value > value) {
      x.swap(trial);
      value = trial_value;
    } else {
      step *= 0.5;
      if (step < 1e-14) {
        converged = true;
        break;
      }
    }
  }

  // Random-hyperplane roundings; ties keep the earliest round.
  std::vector<std::uint8_t> assignment(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> best_assignment;
  int best_value = -1;
  std::vector<double> normal(static_cast<std::size_t>(rank));
  for (int round = 0; round < config.rounding_rounds; ++round) {
    for (auto& c : normal) c = r.normal();
    for (int v = 0; v < n; ++v) {
      const double* pv = row(v);
      double dot = 0.0;
      for (int c = 0; c < rank; ++c) dot += pv[c] * normal[static_cast<std::size_t>(c)];
      assignment[static_cast<std::size_t>(v)] = dot >= 0.0 ? 0 : 1;
    }
    const int rounded = cut_value(g, assignment);
    if (rounded > best_value) {
      best_value = rounded;
      best_assignment = assignment;
    }
  }

  if (config.local_search) local_search_sweep(g, best_assignment);
  auto [cut, tree] = tree_from_cut(g, make_cut(g, best_assignment));

  SolverResult out{std::move(cut), std::move(tree), {}};
  out.meta.solver = "gw";
  out.meta.seed = seed;
  out.meta.iterations = iterations;
  out.meta.rounding_rounds = config.rounding_rounds;
  out.meta.local_search = config.local_search;
  out.meta.converged = converged;
  out.meta.wall_seconds = now_seconds() - t0;
  return out;
}

SolverResult solve_gw_best_of(const SignedGraph& g, int k, std::uint64_t seed,
                              const GwConfig& config) {
  if (k < 1) throw std::invalid_argument("need at least one repetition");
  const double t0 = now_seconds();
  SolverResult best;
  for (int rep = 0; rep < k; ++rep) {
    SolverResult candidate = solve_gw(g, rng::derive(seed, {static_cast<std::uint64_t>(rep)}),
                                      config);
    if (rep == 0 || candidate.cut.value > best.cut.value) best = std::move(candidate);
  }
  best.meta.solver = "gw-best-of";
  best.meta.seed = seed;
  best.meta.wall_seconds = now_seconds() - t0;
  return best;
}

}  // namespace stqaoa
