#pragma once

#include <cstdint>
#include <vector>

#include "stqaoa/quantum_sim.hpp"
#include "stqaoa/signed_graph.hpp"

namespace stqaoa {

enum class GradientMethod {
  adjoint,             // reverse-mode pass through the circuit, cost ~4 evaluations
  finite_difference,   // central differences, cost 2 * n_params evaluations
};

struct OptimizeConfig {
  int max_iterations = 500;
  double improvement_tolerance = 1e-10;  // stop once an accepted step gains less than this
  double initial_step = 0.5;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  GradientMethod gradient_method = GradientMethod::adjoint;
  double fd_step = 1e-5;
  // Parameter vectors tried before any random restarts. Each must have the
  // circuit's parameter count.
  std::vector<std::vector<double>> warm_starts;
};

struct StartTrajectory {
  double final_value = 0.0;
  int iterations = 0;
  bool converged = false;  // stopped on the improvement tolerance rather than the cap
};

struct OptimizeReport {
  std::vector<double> best_params;
  double best_value = 0.0;
  int starts = 0;      // total starts run, warm starts included
  int best_start = 0;  // index into the start order, warm starts first
  std::vector<StartTrajectory> trajectories;
  std::uint64_t seed = 0;
};

// Central finite-difference gradient of the circuit's objective expectation.
std::vector<double> gradient(const Circuit& c, const std::vector<double>& params,
                             const SignedGraph& g, double h = 1e-5);

// Multi-start gradient ascent on the objective expectation. Runs every warm
// start in config order, then `starts` random starts with parameters drawn
// uniformly from [-pi/2, pi/2) using the given seed. Each start climbs with
// backtracking line search until an accepted step improves by less than the
// tolerance or the iteration cap is hit. Ties keep the earliest start.
OptimizeReport optimize(const Circuit& c, const SignedGraph& g, int starts, std::uint64_t seed,
                        const OptimizeConfig& config = {});

}  // namespace stqaoa
