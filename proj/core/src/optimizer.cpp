#include "stqaoa/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stqaoa/rng.hpp"

namespace stqaoa {

std::vector<double> gradient(const Circuit& c, const std::vector<double>& params,
                             const SignedGraph& g, double h) {
  if (static_cast<int>(params.size()) != c.n_params)
    throw std::invalid_argument("parameter count does not match the circuit");
  if (h <= 0.0) throw std::invalid_argument("step must be positive");
  std::vector<double> grads(params.size());
  std::vector<double> shifted = params;
  for (std::size_t k = 0; k < params.size(); ++k) {
    shifted[k] = params[k] + h;
    const double up = evaluate(c, shifted, g);
    shifted[k] = params[k] - h;
    const double down = evaluate(c, shifted, g);
    shifted[k] = params[k];
    grads[k] = (up - down) / (2.0 * h);
  }
  return grads;
}

namespace {

constexpr double kMinStep = 1e-18;

struct ClimbResult {
  std::vector<double> params;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Gradient ascent with Armijo backtracking from a single starting point.
ClimbResult climb(Evaluator& eval, const Circuit& c, const SignedGraph& g,
                  std::vector<double> params, const OptimizeConfig& cfg) {
  ClimbResult out;
  double value = eval.value(params);
  std::vector<double> trial(params.size()), refine(params.size());
  // Each search resumes near the last accepted step (one factor above it)
  // instead of re-descending from the top every iteration.
  double search_start = cfg.initial_step;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    std::vector<double> grads = cfg.gradient_method == GradientMethod::adjoint
                                    ? eval.gradient(params)
                                    : gradient(c, params, g, cfg.fd_step);
    double grad_sq = 0.0;
    for (double gk : grads) grad_sq += gk * gk;
    if (grad_sq == 0.0) {
      out.converged = true;
      break;
    }

    double step = search_start;
    bool accepted = false;
    double trial_value = value;
    while (step >= kMinStep) {
      for (std::size_t k = 0; k < params.size(); ++k) trial[k] = params[k] + step * grads[k];
      trial_value = eval.value(trial);
      if (trial_value >= value + cfg.armijo_c * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    // Keep halving while that lands strictly higher: the first step past the
    // threshold can overshoot a ridge whose curvature matches it, and the
    // shorter candidates clear the sufficient-increase bound a fortiori.
    while (step * cfg.backtrack_factor >= kMinStep) {
      const double shorter = step * cfg.backtrack_factor;
      for (std::size_t k = 0; k < params.size(); ++k)
        refine[k] = params[k] + shorter * grads[k];
      const double refine_value = eval.value(refine);
      if (refine_value <= trial_value) break;
      trial.swap(refine);
      trial_value = refine_value;
      step = shorter;
    }
    search_start = std::min(cfg.initial_step, step / cfg.backtrack_factor);

    const double gain = trial_value - value;
    params.swap(trial);
    value = trial_value;
    out.iterations = iter + 1;
    if (gain < cfg.improvement_tolerance) {
      out.converged = true;
      break;
    }
  }
  out.params = std::move(params);
  out.value = value;
  return out;
}

}  // namespace

OptimizeReport optimize(const Circuit& c, const SignedGraph& g, int starts, std::uint64_t seed,
                        const OptimizeConfig& config) {
  if (starts < 0) throw std::invalid_argument("random start count must be non-negative");
  for (const auto& w : config.warm_starts)
    if (static_cast<int>(w.size()) != c.n_params)
      throw std::invalid_argument("warm start size does not match the circuit");
  const int total = static_cast<int>(config.warm_starts.size()) + starts;
  if (total == 0) throw std::invalid_argument("need at least one start");

  // Draw every random start upfront so the sequence depends only on the seed,
  // not on how long each climb runs.
  rng::Rng r(seed);
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  std::vector<std::vector<double>> inits = config.warm_starts;
  inits.reserve(static_cast<std::size_t>(total));
  for (int s = 0; s < starts; ++s) {
    std::vector<double> p(static_cast<std::size_t>(c.n_params));
    for (auto& x : p) x = r.uniform(-kHalfPi, kHalfPi);
    inits.push_back(std::move(p));
  }

  Evaluator eval(c, g);
  OptimizeReport report;
  report.starts = total;
  report.seed = seed;
  report.trajectories.reserve(inits.size());
  bool have_best = false;
  for (std::size_t s = 0; s < inits.size(); ++s) {
    ClimbResult res = climb(eval, c, g, std::move(inits[s]), config);
    report.trajectories.push_back({res.value, res.iterations, res.converged});
    if (!have_best || res.value > report.best_value) {
      have_best = true;
      report.best_value = res.value;
      report.best_params = std::move(res.params);
      report.best_start = static_cast<int>(s);
    }
  }
  return report;
}

}  // namespace stqaoa
