#include <cinttypes>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stqaoa/experiments.hpp"

namespace {

// "rst", "gw", or "gw:k".
std::pair<std::string, int> parse_sub(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, 1};
  const std::string base = text.substr(0, colon);
  const std::string reps = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const int k = std::stoi(reps, &used);
    if (used != reps.size() || k < 1) throw std::invalid_argument(reps);
    return {base, k};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--sub", "bad repetition count in '" + text + "'");
  }
}

std::vector<stqaoa::AlgorithmSpec> cross_product(const std::vector<std::string>& algos,
                                                 const std::vector<std::string>& subs,
                                                 const std::vector<int>& rounds) {
  std::vector<stqaoa::AlgorithmSpec> specs;
  for (const auto& algo : algos) {
    for (const auto& sub : subs) {
      const auto [base, k] = parse_sub(sub);
      if (algo == "qaoa" || algo == "st-qaoa") {
        for (int r : rounds) specs.push_back({algo, r, base, k});
      } else {
        specs.push_back({algo, 0, base, k});
      }
    }
  }
  return specs;
}

void print_summary(const std::vector<stqaoa::SummaryRow>& rows) {
  std::printf("%-9s %6s %-6s %5s %6s %6s %12s %12s %12s %12s\n", "algo", "rounds", "sub",
              "sub_k", "starts", "graphs", "mean_ratio", "se_ratio", "min_ratio", "max_ratio");
  for (const auto& r : rows)
    std::printf("%-9s %6d %-6s %5d %6d %6d %12.6f %12.6f %12.6f %12.6f\n", r.algo.c_str(),
                r.rounds, r.sub.c_str(), r.sub_k, r.starts, r.graphs, r.mean_ratio, r.se_ratio,
                r.min_ratio, r.max_ratio);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signed MAXCUT variational circuit experiments"};
  app.require_subcommand(1);

  stqaoa::EnsembleConfig config;
  config.out_dir = "ensemble";
  std::vector<std::string> algos{"st-qaoa"};
  std::vector<std::string> subs{"rst"};
  std::vector<int> rounds{1};
  bool paper_scale = false;

  auto add_ensemble_options = [&](CLI::App* cmd) {
    cmd->add_option("--n", config.n, "vertices per graph");
    cmd->add_option("--degree", config.degree, "graph regularity");
    cmd->add_option("--count", config.count, "ensemble size");
    cmd->add_option("--seed", config.master_seed, "master seed");
    cmd->add_option("--out", config.out_dir, "ensemble directory");
  };

  CLI::App* gen = app.add_subcommand("gen-ensemble", "generate the ensemble's graph files");
  add_ensemble_options(gen);

  CLI::App* run = app.add_subcommand("run", "run algorithms over the ensemble");
  add_ensemble_options(run);
  run->add_option("--algo", algos, "algorithms: qaoa, st-qaoa, vst, exact-st")
      ->delimiter(',');
  run->add_option("--sub", subs, "classical subroutines: rst, gw, gw:k")->delimiter(',');
  run->add_option("--rounds", rounds, "circuit rounds (crossed with every --algo)")
      ->delimiter(',');
  run->add_option("--starts", config.starts, "random optimizer starts per algorithm");
  run->add_flag("--paper-scale", paper_scale, "use 250 graphs and 100 starts");
  run->add_flag("--sampled", config.sampled, "also report best-of-1024-samples cut values");

  CLI::App* sweep = app.add_subcommand("gw-sweep", "r=1 tree ansatz vs GW repetitions");
  add_ensemble_options(sweep);
  std::vector<int> ks{1, 4, 16};
  sweep->add_option("--k", ks, "GW repetition counts")->delimiter(',');
  sweep->add_option("--starts", config.starts, "random optimizer starts per algorithm");

  CLI::App* vst = app.add_subcommand("vst-check", "closed form vs statevector and sampler");
  int max_n = 12;
  int draws = 200;
  int instances = 10;
  int samples = 100000;
  std::uint64_t check_seed = 1;
  vst->add_option("--max-n", max_n, "largest instance size");
  vst->add_option("--draws", draws, "equivalence draws");
  vst->add_option("--instances", instances, "sampler instances");
  vst->add_option("--samples", samples, "samples per instance");
  vst->add_option("--seed", check_seed, "seed");

  CLI::App* plot = app.add_subcommand("plot", "render SVG plots and CSVs from records");
  plot->add_option("--out", config.out_dir, "ensemble directory");

  CLI::App* audit = app.add_subcommand("audit", "re-derive and verify an ensemble directory");
  audit->add_option("--out", config.out_dir, "ensemble directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto paths = stqaoa::gen_ensemble(config);
      std::printf("%zu graphs under %s\n", paths.size(),
                  (config.out_dir / "graphs").string().c_str());
      return 0;
    }
    if (*run) {
      if (paper_scale) {
        config.count = 250;
        config.starts = 100;
      }
      config.algorithms = cross_product(algos, subs, rounds);
      const stqaoa::RunOutcome outcome = stqaoa::run_ensemble(config);
      print_summary(stqaoa::summarize(outcome.records));
      for (const auto& f : outcome.failures)
        std::fprintf(stderr, "graph %d failed: %s\n", f.graph_id, f.message.c_str());
      return outcome.failures.empty() ? 0 : 2;
    }
    if (*sweep) {
      const auto rows = stqaoa::gw_repetition_sweep(config, ks);
      print_summary(rows);
      return 0;
    }
    if (*vst) {
      const auto eq = stqaoa::vst_equivalence_check(max_n, draws, check_seed);
      std::printf("equivalence: %d draws, max |closed form - statevector| = %.3e\n", eq.draws,
                  eq.max_error);
      const auto sm = stqaoa::vst_sampler_check(std::min(max_n, 10), instances, samples,
                                                check_seed);
      std::printf("sampler: %d instances, %d pair correlations, worst deviation %.2f sigma\n",
                  sm.instances, sm.comparisons, sm.max_sigma);
      const bool ok = eq.max_error <= 1e-10 && sm.max_sigma <= 3.0 && sm.max_exact_dev <= 1e-12;
      std::printf("%s\n", ok ? "OK" : "MISMATCH");
      return ok ? 0 : 1;
    }
    if (*plot) {
      stqaoa::emit_plots(stqaoa::load_records(config.out_dir), config.out_dir);
      std::printf("plots under %s\n", (config.out_dir / "plots").string().c_str());
      return 0;
    }
    if (*audit) {
      const stqaoa::AuditReport report = stqaoa::audit_records(config.out_dir);
      std::printf("%d records, %d results\n", report.records, report.results);
      for (const auto& p : report.problems) std::printf("problem: %s\n", p.c_str());
      std::printf("%s\n", report.ok() ? "OK" : "FAILED");
      return report.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
