#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "stqaoa/experiments.hpp"
#include "stqaoa/signed_graph.hpp"

using namespace stqaoa;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stqaoa_test_" + name);
  fs::remove_all(dir);
  return dir;
}

EnsembleConfig smoke_config(const fs::path& out_dir) {
  EnsembleConfig config;
  config.n = 8;
  config.degree = 3;
  config.count = 3;
  config.starts = 3;
  config.master_seed = 5;
  config.out_dir = out_dir;
  config.algorithms = {{"exact-st", 0, "rst", 1},
                       {"st-qaoa", 1, "rst", 1},
                       {"st-qaoa", 1, "gw", 2},
                       {"qaoa", 1, "rst", 1},
                       {"vst", 0, "rst", 1}};
  return config;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  REQUIRE(out.good());
}

std::vector<std::string> dir_file_bytes(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<std::string> bytes;
  for (const auto& p : paths) bytes.push_back(p.filename().string() + "\n" + slurp(p));
  return bytes;
}

}  // namespace

TEST_CASE("performance ratio is a guarded quotient") {
  CHECK(performance_ratio(8.0, 10) == doctest::Approx(0.8));
  CHECK(performance_ratio(10.5, 10) == doctest::Approx(1.05));
  CHECK_THROWS_AS(performance_ratio(1.0, 0), std::invalid_argument);
}

TEST_CASE("run_ensemble validates its configuration") {
  const auto dir = fresh_dir("validate");
  auto config = smoke_config(dir);

  auto bad = config;
  bad.out_dir.clear();
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.count = 0;
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.algorithms.clear();
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.starts = 0;
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.algorithms = {{"annealer", 1, "rst", 1}};
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.algorithms = {{"qaoa", 1, "dp", 1}};
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.algorithms = {{"qaoa", 0, "rst", 1}};
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);

  bad = config;
  bad.algorithms = {{"st-qaoa", 1, "gw", 0}};
  CHECK_THROWS_AS(run_ensemble(bad), std::invalid_argument);
}

TEST_CASE("gen_ensemble writes connected graphs deterministically") {
  const auto dir_a = fresh_dir("gen_a");
  const auto dir_b = fresh_dir("gen_b");
  auto config = smoke_config(dir_a);
  const auto paths = gen_ensemble(config);
  REQUIRE(paths.size() == 3);

  for (const auto& p : paths) {
    const auto g = read_graph_file(p.string());
    CHECK(g.n_vertices == 8);
    CHECK(g.edges.size() == 12);
    CHECK(is_connected(g));
  }

  config.out_dir = dir_b;
  const auto again = gen_ensemble(config);
  for (std::size_t k = 0; k < paths.size(); ++k) CHECK(slurp(paths[k]) == slurp(again[k]));

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("ensembles are byte deterministic, resumable, and worker independent") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  const auto dir_c = fresh_dir("det_c");

  auto config = smoke_config(dir_a);
  const auto outcome = run_ensemble(config);
  CHECK(outcome.failures.empty());
  REQUIRE(outcome.records.size() == 3);

  // Same run in a second directory, on two workers.
  auto config_b = smoke_config(dir_b);
  config_b.workers = 2;
  const auto outcome_b = run_ensemble(config_b);
  CHECK(outcome_b.failures.empty());
  CHECK(dir_file_bytes(dir_a / "records") == dir_file_bytes(dir_b / "records"));
  CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));

  // An interrupted run resumes: subset first, then the full algorithm list
  // merges into records identical to the one-shot run.
  auto config_c = smoke_config(dir_c);
  config_c.algorithms = {config.algorithms[1]};
  run_ensemble(config_c);
  config_c = smoke_config(dir_c);
  run_ensemble(config_c);
  CHECK(dir_file_bytes(dir_a / "records") == dir_file_bytes(dir_c / "records"));

  // Rerunning changes nothing.
  const auto before = dir_file_bytes(dir_a / "records");
  run_ensemble(config);
  CHECK(dir_file_bytes(dir_a / "records") == before);

  // Results carry normalized specs: parameterless algorithms at rounds 0.
  bool saw_exact = false;
  for (const auto& r : outcome.records[0].results)
    if (r.spec.algo == "exact-st") {
      saw_exact = true;
      CHECK(r.spec.rounds == 0);
      CHECK(r.starts == 0);
      CHECK(r.best_params.empty());
      CHECK(r.ratio == doctest::Approx(1.0));
    }
  CHECK(saw_exact);

  fs::remove_all(dir_b);
  fs::remove_all(dir_c);

  // Keep dir_a for the audit case below.
  const auto report = audit_records(dir_a);
  CHECK(report.ok());
  CHECK(report.records == 3);
  CHECK(report.results == 15);

  // Loading returns the same records the run reported.
  const auto loaded = load_records(dir_a);
  REQUIRE(loaded.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(loaded[k].graph_id == static_cast<int>(k));
    CHECK(loaded[k].results.size() == 5);
    CHECK(loaded[k].graph_hash == outcome.records[k].graph_hash);
  }

  // Tampering with a stored objective value is caught.
  const auto record_path = dir_a / "records" / "graph_0000.json";
  const auto original = slurp(record_path);
  auto tampered = original;
  const auto pos = tampered.find("\"cq\"");
  REQUIRE(pos != std::string::npos);
  tampered.insert(tampered.find(':', pos) + 2, "9");
  spit(record_path, tampered);
  CHECK_FALSE(audit_records(dir_a).ok());
  spit(record_path, original);
  CHECK(audit_records(dir_a).ok());

  // Changing a graph file's content is caught as a hash mismatch, while
  // cosmetic whitespace is not: the hash covers the canonical edge-list text.
  const auto graph_path = dir_a / "graphs" / "graph_0000.txt";
  const auto graph_text = slurp(graph_path);
  auto flipped = graph_text;
  const auto sign_pos = flipped.find(" -1");
  REQUIRE(sign_pos != std::string::npos);
  flipped.replace(sign_pos, 3, " 1");
  spit(graph_path, flipped);
  CHECK_FALSE(audit_records(dir_a).ok());
  spit(graph_path, graph_text + "\n");
  CHECK(audit_records(dir_a).ok());
  spit(graph_path, graph_text);
  CHECK(audit_records(dir_a).ok());

  fs::remove_all(dir_a);
}

TEST_CASE("worker override comes from the environment when unset") {
  const auto dir = fresh_dir("workers_env");
  auto config = smoke_config(dir);
  config.count = 1;
  config.algorithms = {{"exact-st", 0, "rst", 1}};

  setenv("STQAOA_WORKERS", "not-a-number", 1);
  CHECK_THROWS_AS(run_ensemble(config), std::invalid_argument);

  setenv("STQAOA_WORKERS", "2", 1);
  CHECK(run_ensemble(config).failures.empty());
  unsetenv("STQAOA_WORKERS");

  fs::remove_all(dir);
}

TEST_CASE("sampling can be added to an existing ensemble") {
  const auto dir = fresh_dir("sampled");
  auto config = smoke_config(dir);
  config.count = 2;
  config.algorithms = {{"st-qaoa", 1, "rst", 1}, {"exact-st", 0, "rst", 1}};
  run_ensemble(config);
  for (const auto& rec : load_records(dir))
    for (const auto& r : rec.results) CHECK(r.sampled_best == -1.0);

  config.sampled = true;
  config.sample_count = 256;
  const auto outcome = run_ensemble(config);
  CHECK(outcome.failures.empty());
  for (const auto& rec : load_records(dir))
    for (const auto& r : rec.results) {
      CHECK(r.sampled_best >= 0.0);
      CHECK(r.sampled_best <= rec.m);
      // The exact circuit samples its own encoded cut.
      if (r.spec.algo == "exact-st") CHECK(r.sampled_best == doctest::Approx(r.cc));
    }
  CHECK(audit_records(dir).ok());
  fs::remove_all(dir);
}

TEST_CASE("summaries aggregate per algorithm configuration") {
  EnsembleRecord a, b;
  a.graph_id = 0;
  b.graph_id = 1;
  AlgoResult r;
  r.spec = {"st-qaoa", 1, "rst", 1};
  r.starts = 2;
  r.cc = 10;
  r.cq = 11.0;
  r.ratio = 1.1;
  a.results = {r};
  r.cq = 9.0;
  r.ratio = 0.9;
  b.results = {r};

  const auto rows = summarize({a, b});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].graphs == 2);
  CHECK(rows[0].mean_ratio == doctest::Approx(1.0));
  CHECK(rows[0].se_ratio == doctest::Approx(0.1));
  CHECK(rows[0].min_ratio == doctest::Approx(0.9));
  CHECK(rows[0].max_ratio == doctest::Approx(1.1));
  CHECK(rows[0].mean_cq == doctest::Approx(10.0));
  CHECK(rows[0].mean_cc == doctest::Approx(10.0));
  CHECK(summarize({}).empty());
}

TEST_CASE("repetition sweep returns one row per repetition count") {
  const auto dir = fresh_dir("sweep");
  auto config = smoke_config(dir);
  config.count = 2;
  config.starts = 2;
  const auto rows = gw_repetition_sweep(config, {1, 2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].sub_k == 1);
  CHECK(rows[1].sub_k == 2);
  for (const auto& row : rows) {
    CHECK(row.algo == "st-qaoa");
    CHECK(row.sub == "gw");
    CHECK(row.graphs == 2);
    CHECK(row.mean_ratio >= 1.0 - 1e-9);
  }
  CHECK_THROWS_AS(gw_repetition_sweep(config, {}), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("plots are emitted with their data files") {
  const auto dir = fresh_dir("plots");
  auto config = smoke_config(dir);
  config.count = 2;
  config.starts = 2;
  config.algorithms = {{"st-qaoa", 1, "rst", 1},
                       {"st-qaoa", 2, "rst", 1},
                       {"qaoa", 1, "rst", 1},
                       {"st-qaoa", 1, "gw", 1},
                       {"st-qaoa", 1, "gw", 2}};
  const auto outcome = run_ensemble(config);
  REQUIRE(outcome.failures.empty());
  emit_plots(outcome.records, dir);

  for (const auto* name :
       {"ratio_vs_rounds_rst.svg", "ratio_vs_rounds_gw.svg", "ratio_vs_rounds.csv",
        "scatter_st_qaoa_vs_qaoa.svg", "scatter_st_qaoa_vs_qaoa.csv", "gw_sweep.svg",
        "gw_sweep.csv"}) {
    const auto path = dir / "plots" / name;
    INFO(path.string());
    REQUIRE(fs::exists(path));
    CHECK(fs::file_size(path) > 0);
  }
  const auto svg = slurp(dir / "plots" / "ratio_vs_rounds_rst.svg");
  CHECK(svg.find("<svg") != std::string::npos);

  CHECK_THROWS_AS(emit_plots({}, dir), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("closed-form equivalence harness reports tiny errors") {
  const auto report = vst_equivalence_check(10, 40, 3);
  CHECK(report.draws == 40);
  CHECK(report.max_error <= 1e-10);
  CHECK_THROWS_AS(vst_equivalence_check(1, 10, 3), std::invalid_argument);
  CHECK_THROWS_AS(vst_equivalence_check(10, 0, 3), std::invalid_argument);
}

TEST_CASE("sampler harness stays within statistical bounds") {
  const auto report = vst_sampler_check(8, 3, 20000, 2);
  CHECK(report.instances == 3);
  CHECK(report.comparisons > 0);
  CHECK(report.max_sigma <= 4.0);
  CHECK(report.max_exact_dev <= 1e-12);
  CHECK_THROWS_AS(vst_sampler_check(8, 0, 100, 2), std::invalid_argument);
}
