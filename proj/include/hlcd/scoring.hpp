#pragma once

#include <atomic>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlcd/common.hpp"
#include "hlcd/dataset.hpp"

namespace hlcd {

class Dag;

enum class Criterion { kAic, kBdeu };

Criterion parse_criterion(const std::string& text);  // "aic" | "bdeu"
std::string to_string(Criterion c);

struct ScoreConfig {
  Criterion criterion = Criterion::kBdeu;
  /// Equivalent sample size N' (BDeu only).
  double ess = 1.0;
  /// Relative tolerance for score identities that hold exactly in real arithmetic.
  double eq_tol = 1e-9;

  void validate() const;
};

/// Decomposable local score of child given its parents, natural log.
///
/// AIC:  sum_jk N_jk ln(N_jk / N_j) - (r - 1) q
/// BDeu: sum_j [lnG(N'/q) - lnG(N_j + N'/q) + sum_k (lnG(N_jk + N'/rq) - lnG(N'/rq))]
///
/// Zero cells and empty parent configurations contribute 0. The uniform
/// structure prior is omitted.
double local_score(const ContingencyTable& table, const ScoreConfig& config);
double local_score(const Dataset& data, VarIndex child, std::span<const VarIndex> parents, const ScoreConfig& config);

/// Memoized local scores for one dataset and config. Keys use the sorted
/// parent set and values are computed with that order, so a hit is bit-equal
/// to recomputation. Safe for concurrent use.
class ScoreCache {
 public:
  ScoreCache(const Dataset& data, ScoreConfig config);

  const Dataset& data() const { return data_; }
  const ScoreConfig& config() const { return config_; }

  double score(VarIndex child, std::span<const VarIndex> parents);
  double score(VarIndex child) { return score(child, {}); }

  /// Local scores actually computed (cache misses).
  std::size_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }
  std::size_t size() const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept;
  };

  const Dataset& data_;
  ScoreConfig config_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::vector<std::uint32_t>, double, KeyHash> cache_;
  std::atomic<std::size_t> evaluations_{0};
};

/// S(x -> t) - S({} -> t).
double gain(ScoreCache& cache, VarIndex x, VarIndex t);
double gain(const Dataset& data, VarIndex x, VarIndex t, const ScoreConfig& config);

struct Theorem1Check {
  bool keep = false;
  double gain_xt = 0.0;
  double gain_tx = 0.0;
  /// |gain_xt - gain_tx| <= eq_tol * max(1, |gain_xt|, |gain_tx|).
  bool identity_holds = true;
};

/// Keeps x as a neighbour candidate of t iff the two directional gains agree
/// and are positive.
Theorem1Check theorem1_holds(ScoreCache& cache, VarIndex x, VarIndex t);
Theorem1Check theorem1_holds(const Dataset& data, VarIndex x, VarIndex t, const ScoreConfig& config);

/// [S(x,y -> z) - S(y -> z)] - [S(x -> z) - S({} -> z)]. Positive favours the
/// collider x -> z <- y over the chain/fork structures of the same skeleton.
double collider_statistic(ScoreCache& cache, VarIndex x, VarIndex z, VarIndex y);
double collider_statistic(const Dataset& data, VarIndex x, VarIndex z, VarIndex y, const ScoreConfig& config);

/// Sum of local scores of every node given its DAG parents.
double graph_score(ScoreCache& cache, const Dag& dag);
double graph_score(const Dataset& data, const Dag& dag, const ScoreConfig& config);

}  // namespace hlcd
