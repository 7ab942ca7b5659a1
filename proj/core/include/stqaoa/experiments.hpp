#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stqaoa/classical_solvers.hpp"
#include "stqaoa/signed_graph.hpp"

namespace stqaoa {

// One algorithm/baseline pairing to run per graph. `sub` names the classical
// subroutine: "rst" (one random spanning tree) or "gw" (best of sub_k
// relaxation-and-rounding repetitions). For QAOA the subroutine only supplies
// the denominator of the performance ratio; for ST-QAOA, VST, and the exact
// spanning-tree circuit it also supplies the tree the circuit is built on.
struct AlgorithmSpec {
  std::string algo = "st-qaoa";  // "qaoa" | "st-qaoa" | "vst" | "exact-st"
  int rounds = 1;                // p for qaoa, r for st-qaoa; normalized to 0 otherwise
  std::string sub = "rst";       // "rst" | "gw"
  int sub_k = 1;                 // gw repetitions; always 1 for rst
};

struct AlgoResult {
  AlgorithmSpec spec;
  int starts = 0;          // configured random starts; start_values lists warm starts first
  std::uint64_t seed = 0;  // optimizer seed (0 for exact-st, which has no parameters)
  int cc = 0;              // classical subroutine's satisfied-edge count
  double cq = 0.0;         // optimized objective expectation
  double ratio = 0.0;      // performance_ratio(cq, cc)
  int best_start = -1;
  std::vector<double> best_params;
  std::vector<double> start_values;
  double sampled_best = -1.0;  // best sampled cut value when sampling is enabled
};

struct EnsembleRecord {
  int schema_version = 1;
  int graph_id = 0;
  std::string graph_file;  // relative to the ensemble directory
  std::string graph_hash;  // 16 hex digits over the canonical edge-list text
  int n = 0;
  int m = 0;
  std::vector<AlgoResult> results;  // sorted by (algo, rounds, sub, sub_k, starts)
};

struct EnsembleConfig {
  int n = 16;
  int degree = 3;
  int count = 50;
  int starts = 20;  // random optimizer starts per algorithm (warm starts are extra)
  std::uint64_t master_seed = 1;
  std::filesystem::path out_dir;
  std::vector<AlgorithmSpec> algorithms;
  int edge_sign = -1;  // sign given to every generated edge
  bool sampled = false;
  int sample_count = 1024;
  int workers = 0;  // 0: honor the STQAOA_WORKERS environment variable, default 1
  GwConfig gw;
};

struct SummaryRow {
  std::string algo;
  int rounds = 0;
  std::string sub;
  int sub_k = 1;
  int starts = 0;
  int graphs = 0;
  double mean_ratio = 0.0;
  double se_ratio = 0.0;  // standard error of the mean
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_cq = 0.0;
  double mean_cc = 0.0;
};

struct RunFailure {
  int graph_id = -1;
  std::string message;
};

struct RunOutcome {
  std::vector<EnsembleRecord> records;  // sorted by graph_id
  std::vector<RunFailure> failures;
};

// Quotient of the optimized quantum objective by the classical subroutine's
// satisfied-edge count. Throws if cc < 1.
double performance_ratio(double cq, int cc);

// Generates the ensemble's graph files under out_dir/graphs, skipping files
// whose content already matches. Generation is seeded per graph id and
// redraws until the graph is connected. Returns the file paths in id order.
std::vector<std::filesystem::path> gen_ensemble(const EnsembleConfig& config);

// Runs every configured algorithm on every ensemble graph. Per-graph JSON
// records live under out_dir/records and make the run resumable: results
// already present in a hash-matching record are kept, missing ones are
// computed and merged, and a record whose graph hash no longer matches is
// recomputed from scratch. Also rewrites out_dir/summary.csv. Per-graph
// failures are reported in the outcome, not thrown.
RunOutcome run_ensemble(const EnsembleConfig& config);

// Ensemble means per algorithm configuration, sorted like record results.
std::vector<SummaryRow> summarize(const std::vector<EnsembleRecord>& records);

// Runs r=1 ST-QAOA on GW best-of-k for each k and returns the matching
// summary rows in the order of ks. config.algorithms is ignored.
std::vector<SummaryRow> gw_repetition_sweep(const EnsembleConfig& config,
                                            const std::vector<int>& ks);

// Renders the ensemble's plots under out_dir/plots: mean ratio vs rounds per
// subroutine, a per-graph scatter of ST-QAOA (r=2k) against QAOA (p=k), and
// the GW repetition sweep, each as an SVG plus the underlying CSV. Panels
// with no matching records are skipped. Throws if records is empty.
void emit_plots(const std::vector<EnsembleRecord>& records,
                const std::filesystem::path& out_dir);

// Reads every record under ensemble_dir/records, sorted by graph id.
std::vector<EnsembleRecord> load_records(const std::filesystem::path& ensemble_dir);

struct AuditReport {
  int records = 0;
  int results = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Re-derives everything checkable from an ensemble directory: graph hashes,
// ratio arithmetic, the tree bound cc >= n-1, the r=1 ST-QAOA guarantee
// ratio >= 1 - 1e-9, best-start bookkeeping, parameter counts, and the
// summary.csv contents.
AuditReport audit_records(const std::filesystem::path& ensemble_dir);

struct VstEquivalenceReport {
  int draws = 0;
  double max_error = 0.0;  // |closed form - statevector| over all draws
};

// Compares the closed-form tree-ansatz objective against statevector
// evaluation on random connected signed graphs (2 <= n <= max_n) with
// uniform random angles.
VstEquivalenceReport vst_equivalence_check(int max_n, int draws, std::uint64_t seed);

struct VstSamplerReport {
  int instances = 0;
  int comparisons = 0;        // vertex pairs tested across all instances
  double max_sigma = 0.0;     // worst deviation in binomial standard errors
  double max_exact_dev = 0.0; // worst deviation on pairs with zero variance
};

// Draws `samples` bitstrings per instance from the tree-ansatz sampler and
// checks every vertex pair's empirical spin correlation against the closed
// form, in units of the binomial standard error.
VstSamplerReport vst_sampler_check(int max_n, int instances, int samples, std::uint64_t seed);

}  // namespace stqaoa
