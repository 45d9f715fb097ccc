#include "hlcd/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <ostream>
#include <thread>
#include <tuple>

#include "hlcd/oracle_suite.hpp"
#include "hlcd/rng.hpp"

namespace hlcd {

OracleMode parse_oracle_mode(const std::string& text) {
  if (text == "none") return OracleMode::kNone;
  if (text == "graph") return OracleMode::kGraph;
  if (text == "asymptotic") return OracleMode::kAsymptotic;
  throw Error("unknown oracle mode '" + text + "' (expected none, graph or asymptotic)");
}

std::string to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::kNone: return "none";
    case OracleMode::kGraph: return "graph";
    case OracleMode::kAsymptotic: return "asymptotic";
  }
  return "?";
}

std::string algorithm_label(PcAlgorithm algorithm) {
  switch (algorithm) {
    case PcAlgorithm::kPcSimple: return "HLCD-P";
    case PcAlgorithm::kHitonPc: return "HLCD-H";
    case PcAlgorithm::kFcbf: return "HLCD-FS";
  }
  return "HLCD";
}

std::size_t resolve_threads(std::size_t requested) {
  if (const char* env = std::getenv("HLCD_THREADS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  if (requested == 0) return std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t n, std::size_t r) { return derive_seed(base, n, r); }

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The exception of
// the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Job {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
};

std::vector<Job> make_jobs(OracleMode oracle, const std::vector<std::size_t>& sizes, std::size_t replicates,
                           std::uint64_t seed) {
  std::vector<Job> jobs;
  if (oracle == OracleMode::kGraph) {
    jobs.push_back({0, 0, 0});
    return jobs;
  }
  const std::vector<std::size_t> ns =
      oracle == OracleMode::kAsymptotic ? std::vector<std::size_t>{kAsymptoticRows} : sizes;
  for (const std::size_t n : ns)
    for (std::size_t r = 0; r < replicates; ++r) jobs.push_back({n, r, replicate_seed(seed, n, r)});
  return jobs;
}

std::string fixed(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Display width of UTF-8 text.
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

void write_table(std::ostream& out, const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> widths;
  for (const auto& row : table) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  }
  for (const auto& row : table) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(widths[c] - width(row[c]) + 2, ' ');
    }
    out << line << '\n';
  }
}

}  // namespace

void BenchmarkConfig::validate() const {
  hlcd.validate();
  if (oracle == OracleMode::kNone) {
    if (sizes.empty()) throw Error("benchmark: no sample sizes");
    for (const std::size_t n : sizes)
      if (n == 0) throw Error("benchmark: sample size must be positive");
  }
  if (replicates == 0) throw Error("benchmark: replicates must be positive");
  if (oracle == OracleMode::kGraph && hlcd.pc.algorithm == PcAlgorithm::kFcbf) {
    throw Error("benchmark: the graph oracle does not support fcbf");
  }
}

BenchmarkResult run_benchmark(const Network& net, const BenchmarkConfig& config) {
  config.validate();
  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  const std::vector<Job> jobs = make_jobs(config.oracle, config.sizes, config.replicates, config.seed);
  const std::size_t num_targets = net.num_nodes();

  BenchmarkResult result;
  result.network = config.network_name;
  result.algorithm = algorithm_label(config.hlcd.pc.algorithm);
  result.score = config.oracle == OracleMode::kGraph ? "oracle" : to_string(config.hlcd.score.criterion);
  result.target_names = net.names();

  std::vector<std::unique_ptr<Dataset>> data(jobs.size());
  std::vector<std::shared_ptr<ScoreCache>> scores(jobs.size());
  std::vector<std::shared_ptr<PcCache>> pcs(jobs.size());
  if (config.oracle != OracleMode::kGraph) {
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
      data[j] = std::make_unique<Dataset>(forward_sample(net, jobs[j].n, jobs[j].seed));
      scores[j] = std::make_shared<ScoreCache>(*data[j], config.hlcd.score);
      pcs[j] = std::make_shared<PcCache>();
    });
  }

  const std::vector<std::string> net_names = net.names();
  result.rows.resize(jobs.size() * num_targets);
  parallel_for(result.rows.size(), threads, [&](std::size_t i) {
    const std::size_t j = i / num_targets;
    const VarIndex target = i % num_targets;
    const auto start = std::chrono::steady_clock::now();
    LocalDiscoveryResult found;
    std::span<const std::string> names;
    if (config.oracle == OracleMode::kGraph) {
      found = oracle_discover(net, target, config.hlcd);
      names = net_names;
    } else {
      DataLearner learner(*data[j], config.hlcd, scores[j], pcs[j]);
      found = discover(learner, target, config.hlcd);
      names = data[j]->names();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    BenchmarkRow& row = result.rows[i];
    row.n = jobs[j].n;
    row.replicate = jobs[j].replicate;
    row.target = target;
    row.metrics = local_metrics(found, names, net, config.metrics);
    row.metrics.runtime_s = config.record_runtime ? elapsed : 0.0;
  });
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    return std::tie(a.n, a.replicate, a.target) < std::tie(b.n, b.replicate, b.target);
  });

  std::map<std::size_t, std::map<std::size_t, std::vector<MetricRow>>> grouped;
  for (const auto& row : result.rows) grouped[row.n][row.replicate].push_back(row.metrics);
  for (const auto& [n, reps] : grouped) {
    std::vector<std::vector<MetricRow>> per_rep;
    for (const auto& [r, rows] : reps) per_rep.push_back(rows);
    result.summaries.push_back({n, aggregate(per_rep)});
  }
  return result;
}

void write_results_csv(std::ostream& out, const BenchmarkResult& result) {
  out << "network,algorithm,score,n,replicate,target,f1,precision,recall,shd,undirected,reversed,missing,extra,"
         "runtime_s\n";
  for (const auto& row : result.rows) {
    const MetricRow& m = row.metrics;
    out << result.network << ',' << result.algorithm << ',' << result.score << ',' << row.n << ',' << row.replicate
        << ',' << result.target_names.at(row.target) << ',' << fixed(m.f1) << ',' << fixed(m.precision) << ','
        << fixed(m.recall) << ',' << fixed(m.shd.total()) << ',' << fixed(m.shd.undirected) << ','
        << fixed(m.shd.reversed) << ',' << fixed(m.shd.missing) << ',' << fixed(m.shd.extra) << ','
        << fixed(m.runtime_s) << '\n';
  }
}

void write_summary_table(std::ostream& out, const BenchmarkResult& result) {
  std::vector<std::vector<std::string>> table{{"network", "algorithm", "score", "n", "F1", "Precision", "Recall",
                                               "SHD", "Undirected", "Reversed", "Missing", "Extra"}};
  for (const auto& [n, s] : result.summaries) {
    table.push_back({result.network, result.algorithm, result.score, std::to_string(n), s.f1.format(),
                     s.precision.format(), s.recall.format(), s.shd.format(), s.undirected.format(),
                     s.reversed.format(), s.missing.format(), s.extra.format()});
  }
  write_table(out, table);
}

void AblationConfig::validate() const {
  score.validate();
  if (oracle == OracleMode::kNone) {
    if (sizes.empty()) throw Error("ablate: no sample sizes");
    for (const std::size_t n : sizes)
      if (n == 0) throw Error("ablate: sample size must be positive");
  }
  if (replicates == 0) throw Error("ablate: replicates must be positive");
}

AblationResult run_ablation(const Network& net, const AblationConfig& config) {
  config.validate();
  const std::vector<Job> jobs = make_jobs(config.oracle, config.sizes, config.replicates, config.seed);
  std::vector<Theorem1Ablation> t1(jobs.size());
  std::vector<Theorem2Ablation> t2(jobs.size());
  const Dag& dag = net.dag();
  parallel_for(jobs.size(), std::max<std::size_t>(1, config.threads), [&](std::size_t j) {
    if (config.oracle == OracleMode::kGraph) {
      t1[j] = ablation_theorem1(dag, [&](VarIndex z, VarIndex x) { return dag.adjacent(z, x); });
      t2[j] = ablation_theorem2(dag, [&](VarIndex x, VarIndex z, VarIndex y) {
        return dag.has_edge(x, z) && dag.has_edge(y, z) ? 1.0 : -1.0;
      });
      return;
    }
    const Dataset data = forward_sample(net, jobs[j].n, jobs[j].seed);
    t1[j] = ablation_theorem1(net, data, config.score);
    t2[j] = ablation_theorem2(net, data, config.score);
  });

  AblationResult result;
  result.network = config.network_name;
  result.score = config.oracle == OracleMode::kGraph ? "oracle" : to_string(config.score.criterion);
  std::map<std::size_t, std::vector<std::size_t>> by_size;
  for (std::size_t j = 0; j < jobs.size(); ++j) by_size[jobs[j].n].push_back(j);
  for (const auto& [n, idx] : by_size) {
    std::vector<double> total_pc, get_pc, total_nopc, delete_nopc, total_v, v_acc, total_nov, nov_acc;
    for (const std::size_t j : idx) {
      total_pc.push_back(static_cast<double>(t1[j].total_pc));
      get_pc.push_back(t1[j].get_pc_accuracy());
      total_nopc.push_back(static_cast<double>(t1[j].total_nopc));
      delete_nopc.push_back(t1[j].delete_nopc_accuracy());
      total_v.push_back(static_cast<double>(t2[j].total_v));
      total_nov.push_back(static_cast<double>(t2[j].total_nov));
      if (const auto a = t2[j].v_accuracy()) v_acc.push_back(*a);
      if (const auto a = t2[j].nov_accuracy()) nov_acc.push_back(*a);
    }
    AblationRow row;
    row.n = n;
    row.total_pc = mean_std(total_pc);
    row.get_pc = mean_std(get_pc);
    row.total_nopc = mean_std(total_nopc);
    row.delete_nopc = mean_std(delete_nopc);
    row.total_v = mean_std(total_v);
    row.v_accuracy = mean_std(v_acc);
    row.total_nov = mean_std(total_nov);
    row.nov_accuracy = mean_std(nov_acc);
    row.v_replicates = v_acc.size();
    row.nov_replicates = nov_acc.size();
    result.rows.push_back(row);
  }
  return result;
}

void write_ablation_tables(std::ostream& out, const AblationResult& result) {
  out << "Theorem 1 ablation (" << result.network << ", " << result.score << ")\n";
  std::vector<std::vector<std::string>> t1{{"n", "Total_PC", "Get_PC", "Total_NoPC", "Delete_NoPC"}};
  for (const auto& r : result.rows) {
    t1.push_back({std::to_string(r.n), r.total_pc.format(), r.get_pc.format(), r.total_nopc.format(),
                  r.delete_nopc.format()});
  }
  write_table(out, t1);
  out << "\nTheorem 2 ablation (" << result.network << ", " << result.score << ")\n";
  std::vector<std::vector<std::string>> t2{{"n", "Total_V", "V_Accuracy", "Total_NoV", "NoV_Accuracy"}};
  for (const auto& r : result.rows) {
    t2.push_back({std::to_string(r.n), r.total_v.format(), r.v_replicates ? r.v_accuracy.format() : "n/a",
                  r.total_nov.format(), r.nov_replicates ? r.nov_accuracy.format() : "n/a"});
  }
  write_table(out, t2);
}

}  // namespace hlcd
