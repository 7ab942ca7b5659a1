#include "stqaoa/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "stqaoa/optimizer.hpp"
#include "stqaoa/quantum_sim.hpp"
#include "stqaoa/rng.hpp"
#include "stqaoa/vst_classical.hpp"

namespace stqaoa {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kQuarterPi = std::numbers::pi / 4.0;

std::string format_number(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Algorithm specs and seeds

AlgorithmSpec normalize_spec(AlgorithmSpec s) {
  if (s.algo != "qaoa" && s.algo != "st-qaoa" && s.algo != "vst" && s.algo != "exact-st")
    throw std::invalid_argument("unknown algorithm: " + s.algo);
  if (s.sub != "rst" && s.sub != "gw")
    throw std::invalid_argument("unknown subroutine: " + s.sub);
  if (s.sub_k < 1) throw std::invalid_argument("subroutine repetitions must be >= 1");
  if (s.sub == "rst") s.sub_k = 1;
  if (s.algo == "qaoa" || s.algo == "st-qaoa") {
    if (s.rounds < 1) throw std::invalid_argument("rounds must be >= 1 for " + s.algo);
  } else {
    s.rounds = 0;
  }
  return s;
}

std::string sub_key(const AlgorithmSpec& s) {
  if (s.sub == "rst") return "rst";
  return s.sub_k <= 1 ? "gw" : "gw:" + std::to_string(s.sub_k);
}

int effective_starts(const AlgorithmSpec& s, const EnsembleConfig& config) {
  return s.algo == "exact-st" ? 0 : config.starts;
}

using ResultKey = std::tuple<std::string, int, std::string, int, int>;

ResultKey key_of(const AlgorithmSpec& s, int starts) {
  return {s.algo, s.rounds, s.sub, s.sub_k, starts};
}

ResultKey key_of(const AlgoResult& r) { return key_of(r.spec, r.starts); }

// Optimizer seed. QAOA's key deliberately omits the subroutine: the circuit
// does not depend on it, so records with different denominators share one
// optimization.
std::uint64_t algo_seed(std::uint64_t master, int graph_id, const AlgorithmSpec& s) {
  std::string key = "algo=" + s.algo;
  if (s.rounds > 0) key += ";rounds=" + std::to_string(s.rounds);
  if (s.algo != "qaoa") key += ";sub=" + sub_key(s);
  return rng::derive(master, {rng::fnv1a(key), static_cast<std::uint64_t>(graph_id)});
}

std::uint64_t rst_seed(std::uint64_t master, int graph_id) {
  return rng::derive(master, {rng::fnv1a("solver=rst"), static_cast<std::uint64_t>(graph_id)});
}

// Base seed handed to the repetition fan-out; repetition j runs with
// derive(base, {j}), matching solve_gw_best_of.
std::uint64_t gw_base_seed(std::uint64_t master, int graph_id) {
  return rng::derive(master, {rng::fnv1a("solver=gw"), static_cast<std::uint64_t>(graph_id)});
}

std::uint64_t graph_seed(std::uint64_t master, int graph_id, int attempt) {
  return rng::derive(master, {rng::fnv1a("graph"), static_cast<std::uint64_t>(graph_id),
                              static_cast<std::uint64_t>(attempt)});
}

std::uint64_t sample_seed(std::uint64_t base) { return rng::derive(base, {rng::fnv1a("sample")}); }

// ---------------------------------------------------------------------------
// Files

std::string graph_basename(int graph_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "graph_%04d.txt", graph_id);
  return buf;
}

std::string record_basename(int graph_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "graph_%04d.json", graph_id);
  return buf;
}

std::string graph_hash_hex(const SignedGraph& g) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(rng::fnv1a(write_graph(g))));
  return buf;
}

std::optional<std::string> read_file_if_exists(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw std::runtime_error("failed to read " + path.string());
  return out.str();
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Writes only when the target's bytes differ, so untouched outputs keep
// their timestamps on resumed runs.
void write_if_changed(const fs::path& path, const std::string& content) {
  const auto existing = read_file_if_exists(path);
  if (existing && *existing == content) return;
  atomic_write(path, content);
}

// ---------------------------------------------------------------------------
// Record serialization

ordered_json result_to_json(const AlgoResult& r) {
  ordered_json j;
  j["algo"] = r.spec.algo;
  j["rounds"] = r.spec.rounds;
  j["sub"] = r.spec.sub;
  j["sub_k"] = r.spec.sub_k;
  j["starts"] = r.starts;
  j["seed"] = r.seed;
  j["cc"] = r.cc;
  j["cq"] = r.cq;
  j["ratio"] = r.ratio;
  j["best_start"] = r.best_start;
  j["best_params"] = r.best_params;
  j["start_values"] = r.start_values;
  j["sampled_best"] = r.sampled_best;
  return j;
}

AlgoResult result_from_json(const ordered_json& j) {
  AlgoResult r;
  r.spec.algo = j.at("algo").get<std::string>();
  r.spec.rounds = j.at("rounds").get<int>();
  r.spec.sub = j.at("sub").get<std::string>();
  r.spec.sub_k = j.at("sub_k").get<int>();
  r.starts = j.at("starts").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.cc = j.at("cc").get<int>();
  r.cq = j.at("cq").get<double>();
  r.ratio = j.at("ratio").get<double>();
  r.best_start = j.at("best_start").get<int>();
  r.best_params = j.at("best_params").get<std::vector<double>>();
  r.start_values = j.at("start_values").get<std::vector<double>>();
  r.sampled_best = j.at("sampled_best").get<double>();
  return r;
}

std::string record_to_text(const EnsembleRecord& rec) {
  ordered_json j;
  j["schema_version"] = rec.schema_version;
  j["graph_id"] = rec.graph_id;
  j["graph_file"] = rec.graph_file;
  j["graph_hash"] = rec.graph_hash;
  j["n"] = rec.n;
  j["m"] = rec.m;
  j["results"] = ordered_json::array();
  for (const auto& r : rec.results) j["results"].push_back(result_to_json(r));
  return j.dump(2) + "\n";
}

EnsembleRecord record_from_text(const std::string& text, const std::string& context) {
  try {
    const ordered_json j = ordered_json::parse(text);
    EnsembleRecord rec;
    rec.schema_version = j.at("schema_version").get<int>();
    rec.graph_id = j.at("graph_id").get<int>();
    rec.graph_file = j.at("graph_file").get<std::string>();
    rec.graph_hash = j.at("graph_hash").get<std::string>();
    rec.n = j.at("n").get<int>();
    rec.m = j.at("m").get<int>();
    for (const auto& rj : j.at("results")) rec.results.push_back(result_from_json(rj));
    return rec;
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

void sort_results(std::vector<AlgoResult>& results) {
  std::sort(results.begin(), results.end(),
            [](const AlgoResult& a, const AlgoResult& b) { return key_of(a) < key_of(b); });
}

// ---------------------------------------------------------------------------
// Per-graph work

int resolve_workers(const EnsembleConfig& config) {
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("STQAOA_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || w < 1)
      throw std::invalid_argument("STQAOA_WORKERS must be a positive integer");
    return static_cast<int>(w);
  }
  return 1;
}

struct QaoaRun {
  double cq = 0.0;
  std::vector<double> best_params;
  int best_start = -1;
  std::vector<double> start_values;
  std::uint64_t seed = 0;
};

// Solver and optimization caches for one graph, so subroutine results and
// QAOA optimizations are shared across the algorithm specs that need them.
struct GraphWork {
  const EnsembleConfig& config;
  int graph_id;
  const SignedGraph& g;
  std::optional<SolverResult> rst;
  std::deque<SolverResult> gw_reps;  // deque keeps handed-out references stable
  std::map<std::pair<int, int>, QaoaRun> qaoa_runs;

  const SolverResult& rst_result() {
    if (!rst) rst = solve_random_tree(g, rst_seed(config.master_seed, graph_id));
    return *rst;
  }

  const SolverResult& gw_best(int k) {
    const std::uint64_t base = gw_base_seed(config.master_seed, graph_id);
    while (static_cast<int>(gw_reps.size()) < k)
      gw_reps.push_back(
          solve_gw(g, rng::derive(base, {gw_reps.size()}), config.gw));
    std::size_t best = 0;
    for (std::size_t j = 1; j < static_cast<std::size_t>(k); ++j)
      if (gw_reps[j].cut.value > gw_reps[best].cut.value) best = j;
    return gw_reps[best];
  }

  const SolverResult& sub_result(const AlgorithmSpec& s) {
    return s.sub == "rst" ? rst_result() : gw_best(s.sub_k);
  }

  // Optimizes QAOA at depth p (warm-started from depth p-1) unless a cached
  // or recorded run already covers it.
  const QaoaRun& ensure_qaoa(int p, int starts) {
    const auto key = std::pair(p, starts);
    auto it = qaoa_runs.find(key);
    if (it != qaoa_runs.end()) return it->second;
    OptimizeConfig opt;
    if (p > 1) {
      std::vector<double> warm = ensure_qaoa(p - 1, starts).best_params;
      warm.push_back(0.0);
      warm.push_back(0.0);
      opt.warm_starts.push_back(std::move(warm));
    }
    AlgorithmSpec spec{"qaoa", p, "rst", 1};
    const std::uint64_t seed = algo_seed(config.master_seed, graph_id, spec);
    const Circuit circuit = build_qaoa_circuit(g, p);
    const OptimizeReport report = optimize(circuit, g, starts, seed, opt);
    QaoaRun run;
    run.cq = report.best_value;
    run.best_params = report.best_params;
    run.best_start = report.best_start;
    for (const auto& t : report.trajectories) run.start_values.push_back(t.final_value);
    run.seed = seed;
    return qaoa_runs.emplace(key, std::move(run)).first->second;
  }
};

// Classical point of the tree ansatz: round 0 at (0, pi/4, pi/4) prepares the
// subroutine cut's cat state, later rounds start as the identity.
std::vector<double> st_qaoa_classical_start(int r) {
  std::vector<double> params(static_cast<std::size_t>(3 * r), 0.0);
  params[1] = kQuarterPi;
  params[2] = kQuarterPi;
  return params;
}

// Embeds a depth-p QAOA parameter vector into 2p tree-ansatz rounds: rounds
// (2q, 2q+1) at (-gamma_q, -gamma_q, 0) and (0, 0, -beta_q) rebuild layer q's
// phase and mixer exactly, for any spanning tree. Remaining rounds are zero.
std::vector<double> st_qaoa_embedding(const std::vector<double>& qaoa_params, int r) {
  const int p = static_cast<int>(qaoa_params.size()) / 2;
  std::vector<double> params(static_cast<std::size_t>(3 * r), 0.0);
  for (int q = 0; q < p; ++q) {
    const double gamma = qaoa_params[static_cast<std::size_t>(2 * q)];
    const double beta = qaoa_params[static_cast<std::size_t>(2 * q + 1)];
    params[static_cast<std::size_t>(6 * q)] = -gamma;
    params[static_cast<std::size_t>(6 * q + 1)] = -gamma;
    params[static_cast<std::size_t>(6 * q + 5)] = -beta;
  }
  return params;
}

double best_sampled_cut(const SignedGraph& g, const Circuit& circuit,
                        const std::vector<double>& params, int count, std::uint64_t seed) {
  const StateVector state = run_circuit(circuit, params);
  const auto samples = sample_bitstrings(state, count, seed);
  int best = -1;
  for (const auto& bits : samples) best = std::max(best, cut_value(g, bits));
  return static_cast<double>(best);
}

AlgoResult compute_result(GraphWork& work, const AlgorithmSpec& spec) {
  const EnsembleConfig& config = work.config;
  AlgoResult res;
  res.spec = spec;
  res.starts = effective_starts(spec, config);

  Circuit circuit;
  if (spec.algo == "exact-st") {
    const SolverResult& sub = work.sub_result(spec);
    res.cc = sub.cut.value;
    circuit = build_exact_st_circuit(sub.tree, work.g);
    res.cq = evaluate(circuit, {}, work.g);
  } else if (spec.algo == "qaoa") {
    const QaoaRun& run = work.ensure_qaoa(spec.rounds, res.starts);
    res.seed = run.seed;
    res.cq = run.cq;
    res.best_start = run.best_start;
    res.best_params = run.best_params;
    res.start_values = run.start_values;
    res.cc = work.sub_result(spec).cut.value;
    circuit = build_qaoa_circuit(work.g, spec.rounds);
  } else {
    const SolverResult& sub = work.sub_result(spec);
    res.cc = sub.cut.value;
    OptimizeConfig opt;
    if (spec.algo == "st-qaoa") {
      circuit = build_st_qaoa_circuit(work.g, sub.tree, spec.rounds);
      opt.warm_starts.push_back(st_qaoa_classical_start(spec.rounds));
      if (spec.rounds >= 2) {
        const QaoaRun& run = work.ensure_qaoa(spec.rounds / 2, config.starts);
        opt.warm_starts.push_back(st_qaoa_embedding(run.best_params, spec.rounds));
      }
    } else {  // vst
      circuit = build_vst_circuit(sub.tree);
      const int n_edges = static_cast<int>(sub.tree.edge_order.size());
      std::vector<double> warm(static_cast<std::size_t>(2 * n_edges));
      for (int q = 0; q < n_edges; ++q) {
        warm[static_cast<std::size_t>(q)] =
            sub.tree.edge_order[static_cast<std::size_t>(q)].sign * kQuarterPi;
        warm[static_cast<std::size_t>(n_edges + q)] = kQuarterPi;
      }
      opt.warm_starts.push_back(std::move(warm));
    }
    res.seed = algo_seed(config.master_seed, work.graph_id, spec);
    const OptimizeReport report = optimize(circuit, work.g, res.starts, res.seed, opt);
    res.cq = report.best_value;
    res.best_start = report.best_start;
    res.best_params = report.best_params;
    for (const auto& t : report.trajectories) res.start_values.push_back(t.final_value);
  }

  res.ratio = performance_ratio(res.cq, res.cc);
  if (config.sampled) {
    const std::uint64_t base =
        spec.algo == "exact-st" ? algo_seed(config.master_seed, work.graph_id, spec) : res.seed;
    res.sampled_best =
        best_sampled_cut(work.g, circuit, res.best_params, config.sample_count, sample_seed(base));
  }
  return res;
}

Circuit circuit_for_result(const SignedGraph& g, GraphWork& work, const AlgoResult& r) {
  if (r.spec.algo == "exact-st") return build_exact_st_circuit(work.sub_result(r.spec).tree, g);
  if (r.spec.algo == "qaoa") return build_qaoa_circuit(g, r.spec.rounds);
  if (r.spec.algo == "st-qaoa")
    return build_st_qaoa_circuit(g, work.sub_result(r.spec).tree, r.spec.rounds);
  return build_vst_circuit(work.sub_result(r.spec).tree);
}

// Runs (or completes) one graph's record. Existing results from a
// hash-matching record are kept verbatim; only missing specs are computed.
EnsembleRecord process_graph(const EnsembleConfig& config, int graph_id,
                             const std::vector<AlgorithmSpec>& specs, bool& updated) {
  const fs::path graph_path = config.out_dir / "graphs" / graph_basename(graph_id);
  const SignedGraph g = read_graph_file(graph_path.string());
  const std::string hash = graph_hash_hex(g);
  const fs::path record_path = config.out_dir / "records" / record_basename(graph_id);

  EnsembleRecord rec;
  rec.graph_id = graph_id;
  rec.graph_file = std::string("graphs/") + graph_basename(graph_id);
  rec.graph_hash = hash;
  rec.n = g.n_vertices;
  rec.m = static_cast<int>(g.edges.size());

  const auto existing_text = read_file_if_exists(record_path);
  if (existing_text) {
    const EnsembleRecord old = record_from_text(*existing_text, record_path.string());
    if (old.schema_version == rec.schema_version && old.graph_hash == hash)
      rec.results = old.results;  // a stale hash discards the old results
  }

  std::set<ResultKey> have;
  for (const auto& r : rec.results) have.insert(key_of(r));

  GraphWork work{config, graph_id, g, {}, {}, {}};
  // Recorded QAOA runs feed the cache so resumed runs can warm-start deeper
  // circuits without re-optimizing; JSON round-trips doubles exactly, so the
  // cached values match a fresh computation bit for bit.
  for (const auto& r : rec.results)
    if (r.spec.algo == "qaoa")
      work.qaoa_runs.emplace(std::pair(r.spec.rounds, r.starts),
                             QaoaRun{r.cq, r.best_params, r.best_start, r.start_values, r.seed});
  int computed = 0;
  for (const auto& spec : specs) {
    const ResultKey key = key_of(spec, effective_starts(spec, config));
    if (have.count(key)) continue;
    rec.results.push_back(compute_result(work, spec));
    have.insert(key);
    ++computed;
  }

  // Fill in sampling for kept results that predate a --sampled run.
  if (config.sampled) {
    for (auto& r : rec.results) {
      const ResultKey key = key_of(r);
      const bool requested =
          std::any_of(specs.begin(), specs.end(), [&](const AlgorithmSpec& s) {
            return key_of(s, effective_starts(s, config)) == key;
          });
      if (!requested || r.sampled_best >= 0.0) continue;
      const std::uint64_t base = r.spec.algo == "exact-st"
                                     ? algo_seed(config.master_seed, graph_id, r.spec)
                                     : r.seed;
      r.sampled_best = best_sampled_cut(g, circuit_for_result(g, work, r), r.best_params,
                                        config.sample_count, sample_seed(base));
      ++computed;
    }
  }

  sort_results(rec.results);
  const std::string text = record_to_text(rec);
  const bool changed = !existing_text || *existing_text != text;
  if (changed) atomic_write(record_path, text);
  updated = computed > 0 || changed;
  return rec;
}

// ---------------------------------------------------------------------------
// Summaries

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "algo,rounds,sub,sub_k,starts,graphs,mean_ratio,se_ratio,min_ratio,max_ratio,mean_cq,"
      "mean_cc\n";
  for (const auto& r : rows) {
    out += r.algo + ',' + std::to_string(r.rounds) + ',' + r.sub + ',' +
           std::to_string(r.sub_k) + ',' + std::to_string(r.starts) + ',' +
           std::to_string(r.graphs) + ',' + format_number("%.12g", r.mean_ratio) + ',' +
           format_number("%.12g", r.se_ratio) + ',' + format_number("%.12g", r.min_ratio) + ',' +
           format_number("%.12g", r.max_ratio) + ',' + format_number("%.12g", r.mean_cq) + ',' +
           format_number("%.12g", r.mean_cc) + '\n';
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API

double performance_ratio(double cq, int cc) {
  if (cc < 1) throw std::invalid_argument("classical value must be at least 1");
  return cq / cc;
}

std::vector<std::filesystem::path> gen_ensemble(const EnsembleConfig& config) {
  if (config.count < 1) throw std::invalid_argument("ensemble count must be >= 1");
  if (config.out_dir.empty()) throw std::invalid_argument("output directory is required");
  fs::create_directories(config.out_dir / "graphs");

  std::vector<fs::path> paths;
  paths.reserve(static_cast<std::size_t>(config.count));
  for (int id = 0; id < config.count; ++id) {
    SignedGraph g;
    constexpr int kMaxAttempts = 10000;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts)
        throw std::runtime_error("no connected graph found for id " + std::to_string(id));
      g = random_regular_graph(config.n, config.degree, config.edge_sign,
                               graph_seed(config.master_seed, id, attempt));
      if (is_connected(g)) break;
    }
    const fs::path path = config.out_dir / "graphs" / graph_basename(id);
    write_if_changed(path, write_graph(g));
    paths.push_back(path);
  }
  return paths;
}

RunOutcome run_ensemble(const EnsembleConfig& config) {
  if (config.algorithms.empty()) throw std::invalid_argument("no algorithms configured");
  if (config.starts < 1) throw std::invalid_argument("need at least one optimizer start");
  if (config.sampled && config.sample_count < 1)
    throw std::invalid_argument("sample_count must be >= 1");

  std::vector<AlgorithmSpec> specs;
  std::set<ResultKey> seen;
  for (const auto& raw : config.algorithms) {
    AlgorithmSpec s = normalize_spec(raw);
    if (seen.insert(key_of(s, effective_starts(s, config))).second) specs.push_back(std::move(s));
  }
  std::sort(specs.begin(), specs.end(), [&](const AlgorithmSpec& a, const AlgorithmSpec& b) {
    return key_of(a, effective_starts(a, config)) < key_of(b, effective_starts(b, config));
  });

  gen_ensemble(config);
  fs::create_directories(config.out_dir / "records");

  const int workers = resolve_workers(config);
  std::vector<std::optional<EnsembleRecord>> slots(static_cast<std::size_t>(config.count));
  std::vector<RunFailure> failures;
  std::atomic<int> next{0};
  std::mutex mutex;

  auto run_one = [&](int id) {
    try {
      bool updated = false;
      EnsembleRecord rec = process_graph(config, id, specs, updated);
      const std::lock_guard<std::mutex> lock(mutex);
      std::fprintf(stderr, "graph %d/%d: %zu results%s\n", id + 1, config.count,
                   rec.results.size(), updated ? "" : " (cached)");
      slots[static_cast<std::size_t>(id)] = std::move(rec);
    } catch (const std::exception& e) {
      const std::lock_guard<std::mutex> lock(mutex);
      std::fprintf(stderr, "graph %d/%d: FAILED: %s\n", id + 1, config.count, e.what());
      failures.push_back({id, e.what()});
    }
  };
  auto worker_loop = [&] {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= config.count) return;
      run_one(id);
    }
  };

  if (workers == 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
    for (auto& t : pool) t.join();
  }

  RunOutcome outcome;
  for (auto& slot : slots)
    if (slot) outcome.records.push_back(std::move(*slot));
  std::sort(failures.begin(), failures.end(),
            [](const RunFailure& a, const RunFailure& b) { return a.graph_id < b.graph_id; });
  outcome.failures = std::move(failures);

  write_if_changed(config.out_dir / "summary.csv", summary_to_csv(summarize(outcome.records)));
  return outcome;
}

std::vector<SummaryRow> summarize(const std::vector<EnsembleRecord>& records) {
  struct Acc {
    std::vector<double> ratios;
    double sum_cq = 0.0;
    double sum_cc = 0.0;
  };
  std::map<ResultKey, Acc> groups;
  for (const auto& rec : records) {
    for (const auto& r : rec.results) {
      Acc& acc = groups[key_of(r)];
      acc.ratios.push_back(r.ratio);
      acc.sum_cq += r.cq;
      acc.sum_cc += r.cc;
    }
  }

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    std::tie(row.algo, row.rounds, row.sub, row.sub_k, row.starts) = key;
    const auto count = static_cast<double>(acc.ratios.size());
    row.graphs = static_cast<int>(acc.ratios.size());
    double sum = 0.0;
    row.min_ratio = acc.ratios.front();
    row.max_ratio = acc.ratios.front();
    for (double x : acc.ratios) {
      sum += x;
      row.min_ratio = std::min(row.min_ratio, x);
      row.max_ratio = std::max(row.max_ratio, x);
    }
    row.mean_ratio = sum / count;
    if (acc.ratios.size() > 1) {
      double ss = 0.0;
      for (double x : acc.ratios) ss += (x - row.mean_ratio) * (x - row.mean_ratio);
      row.se_ratio = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    row.mean_cq = acc.sum_cq / count;
    row.mean_cc = acc.sum_cc / count;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> gw_repetition_sweep(const EnsembleConfig& config,
                                            const std::vector<int>& ks) {
  if (ks.empty()) throw std::invalid_argument("need at least one repetition count");
  EnsembleConfig cfg = config;
  cfg.algorithms.clear();
  for (int k : ks) cfg.algorithms.push_back({"st-qaoa", 1, "gw", k});
  const RunOutcome outcome = run_ensemble(cfg);
  const std::vector<SummaryRow> rows = summarize(outcome.records);

  std::vector<SummaryRow> out;
  for (int k : ks) {
    const AlgorithmSpec spec = normalize_spec({"st-qaoa", 1, "gw", k});
    for (const auto& row : rows)
      if (row.algo == spec.algo && row.rounds == spec.rounds && row.sub == spec.sub &&
          row.sub_k == spec.sub_k && row.starts == config.starts) {
        out.push_back(row);
        break;
      }
  }
  return out;
}

std::vector<EnsembleRecord> load_records(const std::filesystem::path& ensemble_dir) {
  const fs::path dir = ensemble_dir / "records";
  if (!fs::is_directory(dir))
    throw std::runtime_error("no records directory under " + ensemble_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<EnsembleRecord> records;
  records.reserve(files.size());
  for (const auto& file : files) {
    const auto text = read_file_if_exists(file);
    if (!text) throw std::runtime_error("failed to read " + file.string());
    records.push_back(record_from_text(*text, file.string()));
  }
  std::sort(records.begin(), records.end(),
            [](const EnsembleRecord& a, const EnsembleRecord& b) {
              return a.graph_id < b.graph_id;
            });
  return records;
}

AuditReport audit_records(const std::filesystem::path& ensemble_dir) {
  AuditReport report;
  auto problem = [&report](const std::string& where, const std::string& what) {
    report.problems.push_back(where + ": " + what);
  };

  std::vector<EnsembleRecord> records;
  try {
    records = load_records(ensemble_dir);
  } catch (const std::exception& e) {
    problem(ensemble_dir.string(), e.what());
    return report;
  }
  if (records.empty()) problem(ensemble_dir.string(), "no records");

  for (const auto& rec : records) {
    const std::string where = "graph " + std::to_string(rec.graph_id);
    report.records += 1;
    if (rec.schema_version != 1)
      problem(where, "unknown schema version " + std::to_string(rec.schema_version));

    std::optional<SignedGraph> g;
    try {
      g = read_graph_file((ensemble_dir / rec.graph_file).string());
    } catch (const std::exception& e) {
      problem(where, e.what());
    }
    if (g) {
      if (graph_hash_hex(*g) != rec.graph_hash) problem(where, "graph hash mismatch");
      if (g->n_vertices != rec.n || static_cast<int>(g->edges.size()) != rec.m)
        problem(where, "graph size mismatch");
    }

    std::set<ResultKey> seen;
    for (const auto& r : rec.results) {
      report.results += 1;
      const std::string rwhere = where + " " + r.spec.algo + "/r" +
                                 std::to_string(r.spec.rounds) + "/" + sub_key(r.spec);
      try {
        const AlgorithmSpec normalized = normalize_spec(r.spec);
        if (normalized.rounds != r.spec.rounds || normalized.sub_k != r.spec.sub_k)
          problem(rwhere, "spec not in normal form");
      } catch (const std::exception& e) {
        problem(rwhere, e.what());
        continue;
      }
      if (!seen.insert(key_of(r)).second) problem(rwhere, "duplicate result");

      if (r.cc < rec.n - 1) problem(rwhere, "classical value below the tree bound");
      if (r.ratio != performance_ratio(r.cq, std::max(r.cc, 1)))
        problem(rwhere, "stored ratio does not equal cq/cc");
      if (r.spec.algo == "st-qaoa" && r.ratio < 1.0 - 1e-9)
        problem(rwhere, "tree ansatz ratio below the r=1 guarantee");
      if (r.spec.algo == "exact-st" && std::abs(r.ratio - 1.0) > 1e-9)
        problem(rwhere, "exact circuit ratio differs from 1");

      int expected_params = 0;
      if (r.spec.algo == "qaoa") expected_params = 2 * r.spec.rounds;
      if (r.spec.algo == "st-qaoa") expected_params = 3 * r.spec.rounds;
      if (r.spec.algo == "vst") expected_params = 2 * (rec.n - 1);
      if (static_cast<int>(r.best_params.size()) != expected_params)
        problem(rwhere, "unexpected parameter count");

      if (r.spec.algo == "exact-st") {
        if (r.starts != 0 || !r.start_values.empty() || r.best_start != -1)
          problem(rwhere, "exact circuit carries optimizer fields");
      } else {
        if (static_cast<int>(r.start_values.size()) < std::max(r.starts, 1))
          problem(rwhere, "missing start values");
        if (r.best_start < 0 || r.best_start >= static_cast<int>(r.start_values.size()))
          problem(rwhere, "best start out of range");
        else if (r.cq != *std::max_element(r.start_values.begin(), r.start_values.end()))
          problem(rwhere, "cq does not equal the best start value");
      }
      if (r.sampled_best >= 0.0 &&
          (r.sampled_best != std::floor(r.sampled_best) || r.sampled_best > rec.m))
        problem(rwhere, "sampled best cut is not a plausible edge count");
    }
  }

  const auto summary = read_file_if_exists(ensemble_dir / "summary.csv");
  if (!summary)
    problem(ensemble_dir.string(), "missing summary.csv");
  else if (*summary != summary_to_csv(summarize(records)))
    problem(ensemble_dir.string(), "summary.csv does not match the records");
  return report;
}

// ---------------------------------------------------------------------------
// Plots

namespace {

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  double se = 0.0;
};

struct PlotSeries {
  std::string label;
  std::vector<PlotPoint> points;
};

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Minimal self-contained SVG chart: line/scatter series with error bars, a
// dashed reference at y = 1, and for scatter panels the diagonal y = x.
std::string render_plot(const std::string& title, const std::string& xlabel,
                        const std::string& ylabel, const std::vector<PlotSeries>& series,
                        bool scatter) {
  constexpr double kW = 640, kH = 440, kL = 72, kR = 24, kT = 44, kB = 56;
  double xmin = 0, xmax = 0, ymin = 1.0, ymax = 1.0;  // y range always shows B = 1
  bool first = true;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (first) {
        xmin = xmax = p.x;
        first = false;
      }
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y - p.se);
      ymax = std::max(ymax, p.y + p.se);
    }
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double margin = span > 0 ? 0.05 * span : 0.5;
    lo -= margin;
    hi += margin;
  };
  pad(xmin, xmax);
  pad(ymin, ymax);
  const auto sx = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR); };
  const auto sy = [&](double y) { return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" "
         "viewBox=\"0 0 640 440\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double xv = xmin + (xmax - xmin) * tick / 4.0;
    const double yv = ymin + (ymax - ymin) * tick / 4.0;
    const std::string xs = svg_number(sx(xv));
    const std::string ys = svg_number(sy(yv));
    svg += "<line x1=\"" + xs + "\" y1=\"" + svg_number(kT) + "\" x2=\"" + xs + "\" y2=\"" +
           svg_number(kH - kB) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"" + svg_number(kL) + "\" y1=\"" + ys + "\" x2=\"" +
           svg_number(kW - kR) + "\" y2=\"" + ys + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + xs + "\" y=\"" + svg_number(kH - kB + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + format_number("%.4g", xv) +
           "</text>\n";
    svg += "<text x=\"" + svg_number(kL - 8) + "\" y=\"" + svg_number(sy(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + format_number("%.4g", yv) + "</text>\n";
  }
  svg += "<rect x=\"" + svg_number(kL) + "\" y=\"" + svg_number(kT) + "\" width=\"" +
         svg_number(kW - kL - kR) + "\" height=\"" + svg_number(kH - kT - kB) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + svg_number((kL + kW - kR) / 2) + "\" y=\"" + svg_number(kH - 14) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + xlabel + "</text>\n";
  svg += "<text x=\"20\" y=\"" + svg_number((kT + kH - kB) / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
         svg_number((kT + kH - kB) / 2) + ")\">" + ylabel + "</text>\n";

  const std::string y1 = svg_number(sy(1.0));
  svg += "<line x1=\"" + svg_number(kL) + "\" y1=\"" + y1 + "\" x2=\"" + svg_number(kW - kR) +
         "\" y2=\"" + y1 + "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
  if (scatter) {
    const double lo = std::max(xmin, ymin), hi = std::min(xmax, ymax);
    if (lo < hi)
      svg += "<line x1=\"" + svg_number(sx(lo)) + "\" y1=\"" + svg_number(sy(lo)) + "\" x2=\"" +
             svg_number(sx(hi)) + "\" y2=\"" + svg_number(sy(hi)) +
             "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3 3\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    if (!scatter && series[s].points.size() > 1) {
      std::string pts;
      for (const auto& p : series[s].points)
        pts += svg_number(sx(p.x)) + "," + svg_number(sy(p.y)) + " ";
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& p : series[s].points) {
      if (p.se > 0) {
        const std::string xs = svg_number(sx(p.x));
        svg += "<line x1=\"" + xs + "\" y1=\"" + svg_number(sy(p.y - p.se)) + "\" x2=\"" + xs +
               "\" y2=\"" + svg_number(sy(p.y + p.se)) + "\" stroke=\"" + color + "\"/>\n";
      }
      svg += "<circle cx=\"" + svg_number(sx(p.x)) + "\" cy=\"" + svg_number(sy(p.y)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "<text x=\"" + svg_number(kW - kR - 8) + "\" y=\"" +
           svg_number(kT + 18 + 16 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" + series[s].label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace

void emit_plots(const std::vector<EnsembleRecord>& records,
                const std::filesystem::path& out_dir) {
  if (records.empty()) throw std::invalid_argument("no records to plot");
  const fs::path plots = out_dir / "plots";
  fs::create_directories(plots);
  const std::vector<SummaryRow> rows = summarize(records);

  // Mean ratio vs rounds, one panel per subroutine.
  {
    std::string csv = "algo,rounds,sub,sub_k,starts,graphs,mean_ratio,se_ratio\n";
    for (const std::string& sub : {std::string("rst"), std::string("gw")}) {
      std::map<std::string, PlotSeries> by_label;
      for (const auto& row : rows) {
        if (row.sub != sub || row.rounds < 1) continue;
        std::string label = row.algo;
        if (row.sub == "gw" && row.sub_k > 1) label += " (gw:" + std::to_string(row.sub_k) + ")";
        by_label[label].label = label;
        by_label[label].points.push_back({static_cast<double>(row.rounds), row.mean_ratio,
                                          row.se_ratio});
        csv += row.algo + ',' + std::to_string(row.rounds) + ',' + row.sub + ',' +
               std::to_string(row.sub_k) + ',' + std::to_string(row.starts) + ',' +
               std::to_string(row.graphs) + ',' + format_number("%.12g", row.mean_ratio) + ',' +
               format_number("%.12g", row.se_ratio) + '\n';
      }
      if (by_label.empty()) continue;
      std::vector<PlotSeries> series;
      for (auto& [label, s] : by_label) series.push_back(std::move(s));
      atomic_write(plots / ("ratio_vs_rounds_" + sub + ".svg"),
                   render_plot("Mean performance ratio vs rounds (" + sub + " baseline)",
                               "rounds", "mean ratio", series, false));
    }
    atomic_write(plots / "ratio_vs_rounds.csv", csv);
  }

  // Scatter of the tree ansatz at r = 2k against QAOA at p = k, per graph.
  {
    std::map<std::tuple<int, std::string, int>, PlotSeries> pairings;
    std::string csv = "graph_id,k,sub,sub_k,ratio_qaoa,ratio_st_qaoa\n";
    for (const auto& rec : records) {
      for (const auto& q : rec.results) {
        if (q.spec.algo != "qaoa") continue;
        for (const auto& t : rec.results) {
          if (t.spec.algo != "st-qaoa" || t.spec.rounds != 2 * q.spec.rounds) continue;
          if (t.spec.sub != q.spec.sub || t.spec.sub_k != q.spec.sub_k || t.starts != q.starts)
            continue;
          const auto key = std::tuple(q.spec.rounds, q.spec.sub, q.spec.sub_k);
          PlotSeries& s = pairings[key];
          s.label = "r=" + std::to_string(t.spec.rounds) + " vs p=" +
                    std::to_string(q.spec.rounds) + " (" + sub_key(q.spec) + ")";
          s.points.push_back({q.ratio, t.ratio, 0.0});
          csv += std::to_string(rec.graph_id) + ',' + std::to_string(q.spec.rounds) + ',' +
                 q.spec.sub + ',' + std::to_string(q.spec.sub_k) + ',' +
                 format_number("%.12g", q.ratio) + ',' + format_number("%.12g", t.ratio) + '\n';
        }
      }
    }
    if (!pairings.empty()) {
      std::vector<PlotSeries> series;
      for (auto& [key, s] : pairings) series.push_back(std::move(s));
      atomic_write(plots / "scatter_st_qaoa_vs_qaoa.svg",
                   render_plot("Tree ansatz (r=2k) vs QAOA (p=k)", "QAOA ratio",
                               "ST-QAOA ratio", series, true));
      atomic_write(plots / "scatter_st_qaoa_vs_qaoa.csv", csv);
    }
  }

  // Mean ratio vs GW repetitions at r = 1.
  {
    PlotSeries s;
    s.label = "st-qaoa r=1";
    std::string csv = "k,graphs,mean_ratio,se_ratio\n";
    for (const auto& row : rows) {
      if (row.algo != "st-qaoa" || row.rounds != 1 || row.sub != "gw") continue;
      s.points.push_back({static_cast<double>(row.sub_k), row.mean_ratio, row.se_ratio});
      csv += std::to_string(row.sub_k) + ',' + std::to_string(row.graphs) + ',' +
             format_number("%.12g", row.mean_ratio) + ',' +
             format_number("%.12g", row.se_ratio) + '\n';
    }
    if (!s.points.empty()) {
      std::sort(s.points.begin(), s.points.end(),
                [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
      atomic_write(plots / "gw_sweep.svg",
                   render_plot("Mean ratio vs GW repetitions (r=1)", "GW repetitions k",
                               "mean ratio", {s}, false));
      atomic_write(plots / "gw_sweep.csv", csv);
    }
  }
}

// ---------------------------------------------------------------------------
// Closed-form cross-checks

namespace {

SignedGraph random_connected_graph(int n, rng::Rng& r) {
  std::vector<SignedEdge> edges;
  std::set<std::pair<int, int>> seen;
  for (int v = 1; v < n; ++v) {
    const int parent = static_cast<int>(r.below(static_cast<std::uint64_t>(v)));
    edges.push_back({parent, v, r.below(2) ? 1 : -1});
    seen.insert({parent, v});
  }
  const int extra = static_cast<int>(r.below(static_cast<std::uint64_t>(n)));
  for (int t = 0; t < extra; ++t) {
    const int u = static_cast<int>(r.below(static_cast<std::uint64_t>(n)));
    const int v = static_cast<int>(r.below(static_cast<std::uint64_t>(n)));
    if (u == v) continue;
    const std::pair<int, int> key{std::min(u, v), std::max(u, v)};
    if (!seen.insert(key).second) continue;
    edges.push_back({key.first, key.second, r.below(2) ? 1 : -1});
  }
  return make_signed_graph(n, std::move(edges));
}

}  // namespace

VstEquivalenceReport vst_equivalence_check(int max_n, int draws, std::uint64_t seed) {
  if (max_n < 2 || max_n > kMaxQubits) throw std::invalid_argument("max_n out of range");
  if (draws < 1) throw std::invalid_argument("need at least one draw");
  constexpr double kPi = std::numbers::pi;

  rng::Rng r(seed);
  VstEquivalenceReport report;
  report.draws = draws;
  for (int d = 0; d < draws; ++d) {
    const int n = 2 + static_cast<int>(r.below(static_cast<std::uint64_t>(max_n - 1)));
    const SignedGraph g = random_connected_graph(n, r);
    const DirectedSpanningTree t = random_spanning_tree(g, r.next());
    std::vector<double> gamma(static_cast<std::size_t>(n - 1));
    std::vector<double> beta(static_cast<std::size_t>(n - 1));
    std::vector<double> params(static_cast<std::size_t>(2 * (n - 1)));
    for (int q = 0; q < n - 1; ++q) {
      gamma[static_cast<std::size_t>(q)] = r.uniform(-kPi, kPi);
      beta[static_cast<std::size_t>(q)] = r.uniform(-kPi, kPi);
      params[static_cast<std::size_t>(q)] = gamma[static_cast<std::size_t>(q)];
      params[static_cast<std::size_t>(n - 1 + q)] = beta[static_cast<std::size_t>(q)];
    }
    const double closed_form = vst_objective(g, t, gamma, beta);
    const double statevector = evaluate(build_vst_circuit(t), params, g);
    report.max_error = std::max(report.max_error, std::abs(closed_form - statevector));
  }
  return report;
}

VstSamplerReport vst_sampler_check(int max_n, int instances, int samples, std::uint64_t seed) {
  if (max_n < 2) throw std::invalid_argument("max_n out of range");
  if (instances < 1 || samples < 1)
    throw std::invalid_argument("need at least one instance and one sample");
  constexpr double kPi = std::numbers::pi;

  rng::Rng r(seed);
  VstSamplerReport report;
  report.instances = instances;
  for (int inst = 0; inst < instances; ++inst) {
    const int n = 2 + static_cast<int>(r.below(static_cast<std::uint64_t>(max_n - 1)));
    const SignedGraph g = random_connected_graph(n, r);
    const DirectedSpanningTree t = random_spanning_tree(g, r.next());
    std::vector<double> gamma(static_cast<std::size_t>(n - 1));
    std::vector<double> beta(static_cast<std::size_t>(n - 1));
    for (int q = 0; q < n - 1; ++q) {
      gamma[static_cast<std::size_t>(q)] = r.uniform(-kPi, kPi);
      beta[static_cast<std::size_t>(q)] = r.uniform(-kPi, kPi);
    }
    const auto bits = vst_sample(t, gamma, beta, samples, r.next());

    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double expected = vst_zz_expectation(t, gamma, beta, i, j);
        long long sum = 0;
        for (const auto& draw : bits)
          sum += (draw[static_cast<std::size_t>(i)] == draw[static_cast<std::size_t>(j)]) ? 1
                                                                                          : -1;
        const double empirical = static_cast<double>(sum) / samples;
        const double variance = std::max(0.0, 1.0 - expected * expected);
        const double sd = std::sqrt(variance / samples);
        report.comparisons += 1;
        if (sd > 0.0)
          report.max_sigma = std::max(report.max_sigma, std::abs(empirical - expected) / sd);
        else
          report.max_exact_dev =
              std::max(report.max_exact_dev, std::abs(empirical - expected));
      }
    }
  }
  return report;
}

}  // namespace stqaoa
