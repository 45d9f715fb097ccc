// hlcd: sampling, local structure discovery, benchmarks, ablations and the
// oracle verification suite.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlcd/benchmark.hpp"
#include "hlcd/dataset.hpp"
#include "hlcd/hlcd_engine.hpp"
#include "hlcd/network.hpp"
#include "hlcd/oracle_suite.hpp"

#ifndef HLCD_DATA_DIR
#define HLCD_DATA_DIR "data"
#endif

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlgorithmFlags {
  std::string pc_alg = "pc-simple";
  std::string score = "bdeu";
  double ess = 1.0;
  double alpha = 0.01;
  double mi_threshold = 0.03;
  std::string relevance = "su";
  std::optional<std::size_t> max_cond;
  std::string df_rule = "levels";
  bool credit_undirected = false;
  std::string oracle = "none";

  void add_to(CLI::App& app, bool with_pc = true) {
    if (with_pc) {
      app.add_option("--pc-alg", pc_alg, "PC discovery algorithm")
          ->check(CLI::IsMember({"pc-simple", "hiton", "fcbf"}))
          ->capture_default_str();
      app.add_option("--alpha", alpha, "CI test significance level")->capture_default_str();
      app.add_option("--mi-threshold", mi_threshold, "FCBF relevance threshold")->capture_default_str();
      app.add_option("--relevance", relevance, "FCBF relevance measure")
          ->check(CLI::IsMember({"su", "mi"}))
          ->capture_default_str();
      app.add_option("--max-cond", max_cond, "largest conditioning set");
      app.add_option("--df", df_rule, "G^2 degrees of freedom: full, strata or levels")
          ->check(CLI::IsMember({"full", "strata", "levels"}))
          ->capture_default_str();
    }
    app.add_option("--score", score, "score criterion")->check(CLI::IsMember({"aic", "bdeu"}))->capture_default_str();
    app.add_option("--ess", ess, "BDeu equivalent sample size")->capture_default_str();
  }

  hlcd::HlcdOptions options() const {
    hlcd::HlcdOptions o;
    o.pc.algorithm = hlcd::parse_pc_algorithm(pc_alg);
    o.pc.alpha = alpha;
    o.pc.mi_threshold = mi_threshold;
    o.pc.relevance = relevance == "mi" ? hlcd::RelevanceMeasure::kMutualInformation
                                       : hlcd::RelevanceMeasure::kSymmetricUncertainty;
    o.pc.max_cond_size = max_cond;
    o.pc.df_rule = hlcd::parse_df_rule(df_rule);
    o.score.criterion = hlcd::parse_criterion(score);
    o.score.ess = ess;
    try {
      o.validate();
    } catch (const hlcd::Error& e) {
      throw UsageError(e.what());
    }
    return o;
  }
};

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hlcd::Error("cannot open '" + path + "' for writing");
  return out;
}

std::string join(const hlcd::VarSet& vars, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) out += (i ? ", " : "") + names[vars[i]];
  return out.empty() ? "(none)" : out;
}

hlcd::VarIndex resolve_target(const hlcd::Dataset& data, const std::string& target) {
  if (data.contains(target)) return data.index_of(target);
  throw UsageError("unknown target '" + target + "'");
}

int run_sample(const std::string& net_path, const std::vector<std::size_t>& sizes, std::size_t reps,
               std::uint64_t seed, const std::string& out) {
  const hlcd::Network net = hlcd::load_network_file(net_path);
  if (sizes.size() == 1 && reps == 1) {
    hlcd::write_dataset_file(out, hlcd::forward_sample(net, sizes[0], hlcd::replicate_seed(seed, sizes[0], 0)));
    return 0;
  }
  std::filesystem::create_directories(out);
  for (const std::size_t n : sizes) {
    for (std::size_t r = 0; r < reps; ++r) {
      const auto path = std::filesystem::path(out) /
                        (stem(net_path) + "_n" + std::to_string(n) + "_r" + std::to_string(r) + ".csv");
      hlcd::write_dataset_file(path.string(), hlcd::forward_sample(net, n, hlcd::replicate_seed(seed, n, r)));
    }
  }
  return 0;
}

int run_discover(const std::string& data_path, const std::string& target_name, const hlcd::HlcdOptions& options,
                 bool string_categories, bool record_runtime, const std::string& json_path) {
  hlcd::CsvOptions csv;
  csv.map_string_categories = string_categories;
  const hlcd::Dataset data = hlcd::load_dataset_file(data_path, csv);
  const hlcd::VarIndex target = resolve_target(data, target_name);

  const auto start = std::chrono::steady_clock::now();
  const hlcd::LocalDiscoveryResult r = hlcd::discover(data, target, options);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& names = data.names();
  const hlcd::Diagnostics& d = r.diagnostics;
  std::cout << "target:     " << names[target] << '\n'
            << "parents:    " << join(r.parents, names) << '\n'
            << "children:   " << join(r.children, names) << '\n'
            << "undirected: " << join(r.undirected, names) << '\n'
            << "visited:    " << join(r.visited, names) << '\n'
            << "iterations " << d.iterations << ", CI tests " << d.ci_tests << ", score evaluations "
            << d.score_evaluations << ", v-structures " << d.v_structures << '\n';

  auto name_list = [&](const hlcd::VarSet& vars) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto v : vars) arr.push_back(names[v]);
    return arr;
  };
  nlohmann::ordered_json record;
  record["target"] = names[target];
  record["algorithm"] = hlcd::algorithm_label(options.pc.algorithm);
  record["score"] = hlcd::to_string(options.score.criterion);
  record["parents"] = name_list(r.parents);
  record["children"] = name_list(r.children);
  record["undirected"] = name_list(r.undirected);
  record["visited"] = name_list(r.visited);
  record["diagnostics"] = {{"iterations", d.iterations},
                           {"pc_discoveries", d.pc_discoveries},
                           {"ci_tests", d.ci_tests},
                           {"score_evaluations", d.score_evaluations},
                           {"theorem1_removals", d.theorem1_removals},
                           {"identity_violations", d.identity_violations},
                           {"v_structures", d.v_structures},
                           {"orientation_conflicts", d.orientation_conflicts},
                           {"meek_orientations", d.meek_orientations}};
  record["runtime_s"] = record_runtime ? elapsed : 0.0;
  if (json_path.empty()) {
    std::cout << record.dump() << '\n';
  } else {
    auto out = open_output(json_path);
    out << record.dump(2) << '\n';
  }
  return 0;
}

int run_benchmark(const std::string& net_path, hlcd::BenchmarkConfig config, const std::string& out_path) {
  const hlcd::Network net = hlcd::load_network_file(net_path);
  config.network_name = stem(net_path);
  const hlcd::BenchmarkResult result = hlcd::run_benchmark(net, config);
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    hlcd::write_results_csv(out, result);
  }
  hlcd::write_summary_table(std::cout, result);
  return 0;
}

int run_ablate(const std::string& net_path, hlcd::AblationConfig config, const std::string& out_path) {
  const hlcd::Network net = hlcd::load_network_file(net_path);
  config.network_name = stem(net_path);
  const hlcd::AblationResult result = hlcd::run_ablation(net, config);
  std::ostringstream text;
  hlcd::write_ablation_tables(text, result);
  std::cout << text.str();
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    out << text.str();
  }
  return 0;
}

int run_verify(hlcd::VerifyOptions options, bool quiet) {
  const hlcd::VerifyReport report = hlcd::verify(options, [&](const std::string& line) {
    if (!quiet || line.rfind("[FAIL]", 0) == 0) std::cout << line << std::endl;
  });
  std::cout << (report.passed() ? "verify: all checks passed" : "verify: FAILED") << std::endl;
  return report.passed() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local causal structure discovery for discrete Bayesian networks"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::size_t threads = 1;
  AlgorithmFlags flags;

  // sample
  auto* sample = app.add_subcommand("sample", "forward-sample datasets from a network");
  std::string sample_net, sample_out;
  std::vector<std::size_t> sample_sizes{500};
  std::size_t sample_reps = 1;
  sample->add_option("--net", sample_net, "network file (.json or .bif)")->required();
  sample->add_option("--sizes,-n", sample_sizes, "sample sizes")->delimiter(',')->capture_default_str();
  sample->add_option("--reps", sample_reps, "replicates per size")->capture_default_str();
  sample->add_option("--seed", seed, "base seed")->capture_default_str();
  sample->add_option("--out", sample_out, "output CSV, or a directory when several datasets are drawn")->required();

  // discover
  auto* disc = app.add_subcommand("discover", "learn the local structure of one target");
  std::string disc_data, disc_target, disc_json;
  bool string_categories = false;
  bool record_runtime = false;
  disc->add_option("--data", disc_data, "dataset CSV")->required();
  disc->add_option("--target", disc_target, "target column name")->required();
  disc->add_option("--json", disc_json, "write the JSON record to this file instead of stdout");
  disc->add_flag("--string-categories", string_categories, "code non-integer columns as labels");
  disc->add_flag("--record-runtime", record_runtime, "report wall-clock runtime");
  flags.add_to(*disc);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "per-target metrics over sampled replicates");
  std::string bench_net, bench_out;
  std::vector<std::size_t> bench_sizes{500};
  std::size_t bench_reps = 10;
  bench->add_option("--net", bench_net, "network file (.json or .bif)")->required();
  bench->add_option("--sizes", bench_sizes, "sample sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--reps", bench_reps, "replicates per size")->capture_default_str();
  bench->add_option("--seed", seed, "base seed")->capture_default_str();
  bench->add_option("--threads", threads, "worker threads (0: all cores; HLCD_THREADS overrides)")
      ->capture_default_str();
  bench->add_option("--out", bench_out, "results CSV");
  bench->add_flag("--credit-undirected", flags.credit_undirected, "count undirected true edges as correct");
  bench->add_flag("--record-runtime", record_runtime, "report wall-clock runtimes");
  bench->add_option("--oracle", flags.oracle, "oracle mode")
      ->check(CLI::IsMember({"none", "graph", "asymptotic"}))
      ->capture_default_str();
  flags.add_to(*bench);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "accuracy of the two score predicates on the true graph");
  std::string ablate_net, ablate_out;
  std::vector<std::size_t> ablate_sizes{500};
  std::size_t ablate_reps = 10;
  ablate->add_option("--net", ablate_net, "network file (.json or .bif)")->required();
  ablate->add_option("--sizes", ablate_sizes, "sample sizes")->delimiter(',')->capture_default_str();
  ablate->add_option("--reps", ablate_reps, "replicates per size")->capture_default_str();
  ablate->add_option("--seed", seed, "base seed")->capture_default_str();
  ablate->add_option("--threads", threads, "worker threads (0: all cores; HLCD_THREADS overrides)")
      ->capture_default_str();
  ablate->add_option("--out", ablate_out, "also write the tables to this file");
  ablate->add_option("--oracle", flags.oracle, "oracle mode")
      ->check(CLI::IsMember({"none", "graph", "asymptotic"}))
      ->capture_default_str();
  flags.add_to(*ablate, false);

  // verify
  auto* ver = app.add_subcommand("verify", "oracle and score-identity checks");
  std::size_t max_nodes = 6;
  std::size_t fuzz_trials = 1000;
  std::vector<std::string> verify_nets;
  bool quiet = false;
  ver->add_option("--max-nodes", max_nodes, "enumerate all DAGs up to this many nodes")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  ver->add_option("--net", verify_nets, "networks for the oracle run (default: bundled Alarm)");
  ver->add_option("--fuzz-trials", fuzz_trials, "random datasets for the score identities")->capture_default_str();
  ver->add_option("--seed", seed, "fuzzing seed")->capture_default_str();
  ver->add_option("--threads", threads, "worker threads (0: all cores; HLCD_THREADS overrides)")
      ->capture_default_str();
  ver->add_flag("--quiet", quiet, "print failures only");
  ver->add_option("--pc-alg", flags.pc_alg, "PC discovery algorithm")
      ->check(CLI::IsMember({"pc-simple", "hiton"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sample) {
      if (sample_reps == 0) throw UsageError("--reps must be positive");
      for (const auto n : sample_sizes)
        if (n == 0) throw UsageError("sample sizes must be positive");
      return run_sample(sample_net, sample_sizes, sample_reps, seed, sample_out);
    }
    if (*disc) return run_discover(disc_data, disc_target, flags.options(), string_categories, record_runtime, disc_json);
    if (*bench) {
      hlcd::BenchmarkConfig config;
      config.sizes = bench_sizes;
      config.replicates = bench_reps;
      config.seed = seed;
      config.hlcd = flags.options();
      config.metrics.credit_undirected = flags.credit_undirected;
      config.oracle = hlcd::parse_oracle_mode(flags.oracle);
      config.threads = hlcd::resolve_threads(threads);
      config.record_runtime = record_runtime;
      try {
        config.validate();
      } catch (const hlcd::Error& e) {
        throw UsageError(e.what());
      }
      return run_benchmark(bench_net, config, bench_out);
    }
    if (*ablate) {
      hlcd::AblationConfig config;
      config.sizes = ablate_sizes;
      config.replicates = ablate_reps;
      config.seed = seed;
      config.score = flags.options().score;
      config.oracle = hlcd::parse_oracle_mode(flags.oracle);
      config.threads = hlcd::resolve_threads(threads);
      try {
        config.validate();
      } catch (const hlcd::Error& e) {
        throw UsageError(e.what());
      }
      return run_ablate(ablate_net, config, ablate_out);
    }
    if (*ver) {
      hlcd::VerifyOptions options;
      options.max_nodes = max_nodes;
      options.fuzz_trials = fuzz_trials;
      options.seed = seed;
      options.threads = hlcd::resolve_threads(threads);
      options.hlcd.pc.algorithm = hlcd::parse_pc_algorithm(flags.pc_alg);
      options.network_paths = verify_nets;
      if (options.network_paths.empty()) options.network_paths.push_back(HLCD_DATA_DIR "/networks/alarm.bif");
      return run_verify(options, quiet);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
