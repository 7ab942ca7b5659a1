#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "stqaoa/classical_solvers.hpp"
#include "stqaoa/quantum_sim.hpp"
#include "stqaoa/signed_graph.hpp"
#include "stqaoa/vst_classical.hpp"

namespace {

stqaoa::SignedGraph bench_graph() {
  for (std::uint64_t attempt = 0;; ++attempt) {
    stqaoa::SignedGraph g = stqaoa::random_regular_graph(16, 3, -1, attempt);
    if (stqaoa::is_connected(g)) return g;
  }
}

std::vector<double> ramp(int count) {
  std::vector<double> params(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) params[static_cast<std::size_t>(k)] = 0.1 * (k + 1);
  return params;
}

void bm_apply_zz(benchmark::State& state) {
  stqaoa::StateVector s = stqaoa::plus_state(16);
  const stqaoa::Gate g = stqaoa::zz_gate(3, 11, -1, -1, 0.37);
  for (auto _ : state) {
    stqaoa::apply_gate(s, g, 0.37);
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
}
BENCHMARK(bm_apply_zz);

void bm_apply_x(benchmark::State& state) {
  stqaoa::StateVector s = stqaoa::plus_state(16);
  const stqaoa::Gate g = stqaoa::x_gate(7, -1, 0.37);
  for (auto _ : state) {
    stqaoa::apply_gate(s, g, 0.37);
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
}
BENCHMARK(bm_apply_x);

void bm_evaluate_qaoa_p4(benchmark::State& state) {
  const stqaoa::SignedGraph g = bench_graph();
  const stqaoa::Circuit c = stqaoa::build_qaoa_circuit(g, 4);
  const std::vector<double> params = ramp(c.n_params);
  for (auto _ : state) benchmark::DoNotOptimize(stqaoa::evaluate(c, params, g));
}
BENCHMARK(bm_evaluate_qaoa_p4);

void bm_evaluator_value_st_qaoa_r4(benchmark::State& state) {
  const stqaoa::SignedGraph g = bench_graph();
  const stqaoa::SolverResult sub = stqaoa::solve_random_tree(g, 1);
  stqaoa::Evaluator eval(stqaoa::build_st_qaoa_circuit(g, sub.tree, 4), g);
  const std::vector<double> params = ramp(eval.n_params());
  for (auto _ : state) benchmark::DoNotOptimize(eval.value(params));
}
BENCHMARK(bm_evaluator_value_st_qaoa_r4);

void bm_evaluator_gradient_st_qaoa_r4(benchmark::State& state) {
  const stqaoa::SignedGraph g = bench_graph();
  const stqaoa::SolverResult sub = stqaoa::solve_random_tree(g, 1);
  stqaoa::Evaluator eval(stqaoa::build_st_qaoa_circuit(g, sub.tree, 4), g);
  const std::vector<double> params = ramp(eval.n_params());
  for (auto _ : state) benchmark::DoNotOptimize(eval.gradient(params));
}
BENCHMARK(bm_evaluator_gradient_st_qaoa_r4);

void bm_solve_gw(benchmark::State& state) {
  const stqaoa::SignedGraph g = bench_graph();
  for (auto _ : state) benchmark::DoNotOptimize(stqaoa::solve_gw(g, 42).cut.value);
}
BENCHMARK(bm_solve_gw);

void bm_vst_sample_1024(benchmark::State& state) {
  const stqaoa::SignedGraph g = bench_graph();
  const stqaoa::SolverResult sub = stqaoa::solve_random_tree(g, 1);
  const std::vector<double> gamma = ramp(15);
  const std::vector<double> beta = ramp(15);
  for (auto _ : state)
    benchmark::DoNotOptimize(stqaoa::vst_sample(sub.tree, gamma, beta, 1024, 7));
}
BENCHMARK(bm_vst_sample_1024);

}  // namespace

BENCHMARK_MAIN();
