#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hlcd/graph_eval.hpp"
#include "hlcd/hlcd_engine.hpp"
#include "hlcd/network.hpp"

namespace hlcd {

/// none: sampled data at each size. graph: d-separation and graph-truth
/// predicates, no data. asymptotic: one sample of kAsymptoticRows rows.
enum class OracleMode { kNone, kGraph, kAsymptotic };

inline constexpr std::size_t kAsymptoticRows = 50000;

OracleMode parse_oracle_mode(const std::string& text);
std::string to_string(OracleMode mode);

/// HLCD-P, HLCD-H or HLCD-FS.
std::string algorithm_label(PcAlgorithm algorithm);

/// HLCD_THREADS when set to a positive integer, else requested; 0 means
/// every hardware thread.
std::size_t resolve_threads(std::size_t requested);

/// Seed of replicate r at sample size n.
std::uint64_t replicate_seed(std::uint64_t base, std::size_t n, std::size_t r);

struct BenchmarkConfig {
  std::string network_name;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  HlcdOptions hlcd;
  MetricOptions metrics;
  OracleMode oracle = OracleMode::kNone;
  std::size_t threads = 1;
  /// Wall-clock runtimes make output differ between runs, so they are
  /// written as 0 unless asked for.
  bool record_runtime = false;

  void validate() const;
};

struct BenchmarkRow {
  std::size_t n = 0;
  std::size_t replicate = 0;
  VarIndex target = 0;
  MetricRow metrics;
};

struct SizeSummary {
  std::size_t n = 0;
  MetricSummary summary;
};

struct BenchmarkResult {
  std::string network;
  std::string algorithm;
  std::string score;
  std::vector<std::string> target_names;
  /// Sorted by (n, replicate, target).
  std::vector<BenchmarkRow> rows;
  std::vector<SizeSummary> summaries;
};

/// Every target of every replicate dataset. Replicates at one size share PC
/// and score caches, so the rows do not depend on the thread count.
BenchmarkResult run_benchmark(const Network& net, const BenchmarkConfig& config);

/// network,algorithm,score,n,replicate,target,f1,precision,recall,shd,undirected,reversed,missing,extra,runtime_s
void write_results_csv(std::ostream& out, const BenchmarkResult& result);
void write_summary_table(std::ostream& out, const BenchmarkResult& result);

struct AblationConfig {
  std::string network_name;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  ScoreConfig score;
  OracleMode oracle = OracleMode::kNone;
  std::size_t threads = 1;

  void validate() const;
};

struct AblationRow {
  std::size_t n = 0;
  MeanStd total_pc, get_pc, total_nopc, delete_nopc;
  MeanStd total_v, v_accuracy, total_nov, nov_accuracy;
  /// Replicates in which the network had any triple of each kind.
  std::size_t v_replicates = 0;
  std::size_t nov_replicates = 0;
};

struct AblationResult {
  std::string network;
  std::string score;
  std::vector<AblationRow> rows;
};

AblationResult run_ablation(const Network& net, const AblationConfig& config);
void write_ablation_tables(std::ostream& out, const AblationResult& result);

}  // namespace hlcd
