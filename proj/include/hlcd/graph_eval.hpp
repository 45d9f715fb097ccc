#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlcd/dataset.hpp"
#include "hlcd/hlcd_engine.hpp"
#include "hlcd/meek.hpp"
#include "hlcd/network.hpp"
#include "hlcd/scoring.hpp"

namespace hlcd {

/// Structural Hamming distance of one target's local structure against the
/// true DAG, split by error kind.
struct ShdBreakdown {
  double undirected = 0.0;  // learned undirected, truly adjacent
  double reversed = 0.0;    // learned directed against the true direction
  double missing = 0.0;     // true edge with no learned edge
  double extra = 0.0;       // learned edge (any mark) on a non-adjacent pair

  double total() const { return undirected + reversed + missing + extra; }
};

struct MetricRow {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  ShdBreakdown shd;
  double runtime_s = 0.0;
};

struct MetricOptions {
  /// Count a learned undirected edge on a true adjacency as correct for
  /// precision/recall. SHD is unaffected.
  bool credit_undirected = false;
};

/// Compares the edges at result.target with the edges at the same node in
/// the true DAG. learned_names maps result indices to network node names;
/// throws Error on a name that the network lacks.
MetricRow local_metrics(const LocalDiscoveryResult& result, std::span<const std::string> learned_names,
                        const Network& truth, const MetricOptions& options = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  /// "A±B" with the given number of decimals.
  std::string format(int decimals = 2) const;
};

/// Mean and population standard deviation; zeros for no values.
MeanStd mean_std(std::span<const double> values);

struct MetricSummary {
  MeanStd f1, precision, recall, shd, undirected, reversed, missing, extra, runtime_s;
  std::size_t replicates = 0;
};

/// rows[r] holds every target's row of replicate r. Each metric is averaged
/// over targets within a replicate; the summary reports the mean and the
/// population standard deviation of those replicate means.
MetricSummary aggregate(const std::vector<std::vector<MetricRow>>& rows);

struct Theorem1Ablation {
  std::size_t total_pc = 0;
  std::size_t kept_pc = 0;
  std::size_t total_nopc = 0;
  std::size_t deleted_nopc = 0;

  double get_pc_accuracy() const;
  double delete_nopc_accuracy() const;
};

/// For every ordered pair (z, x != z): a true neighbour should be kept by the
/// symmetric-gain predicate, a non-neighbour deleted.
Theorem1Ablation ablation_theorem1(const Dag& truth, const std::function<bool(VarIndex z, VarIndex x)>& keep);
Theorem1Ablation ablation_theorem1(const Network& truth, const Dataset& data, const ScoreConfig& config);

struct Theorem2Ablation {
  std::size_t total_v = 0;
  std::size_t correct_v = 0;
  std::size_t total_nov = 0;
  std::size_t correct_nov = 0;

  /// Empty when the network has no triples of that kind.
  std::optional<double> v_accuracy() const;
  std::optional<double> nov_accuracy() const;
};

/// Every unshielded triple x - z - y of the true DAG: a collider x -> z <- y
/// is identified when the collider statistic is positive, any other triple
/// when it is not.
Theorem2Ablation ablation_theorem2(const Dag& truth,
                                   const std::function<double(VarIndex x, VarIndex z, VarIndex y)>& statistic);
Theorem2Ablation ablation_theorem2(const Network& truth, const Dataset& data, const ScoreConfig& config);

}  // namespace hlcd
