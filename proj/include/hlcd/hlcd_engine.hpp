#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hlcd/common.hpp"
#include "hlcd/dataset.hpp"
#include "hlcd/pc_discovery.hpp"
#include "hlcd/pdag.hpp"
#include "hlcd/scoring.hpp"

namespace hlcd {

struct HlcdOptions {
  PcOptions pc;
  ScoreConfig score;
  /// Only test collider patterns x -> z <- y whose ends are not adjacent.
  bool require_nonadjacent_pairs = true;

  void validate() const;
};

struct Diagnostics {
  std::size_t iterations = 0;
  std::size_t pc_discoveries = 0;
  std::size_t ci_tests = 0;
  std::size_t score_evaluations = 0;
  std::size_t theorem1_removals = 0;
  /// Gain pairs that disagreed beyond eq_tol; nonzero means a numerical bug.
  std::size_t identity_violations = 0;
  std::size_t v_structures = 0;
  std::size_t orientation_conflicts = 0;
  std::size_t meek_orientations = 0;
};

struct LocalDiscoveryResult {
  VarIndex target = 0;
  VarSet parents;
  VarSet children;
  VarSet undirected;
  /// Nodes whose PC set was learned, in visiting order.
  std::vector<VarIndex> visited;
  Pdag pdag;
  Diagnostics diagnostics;
};

/// The three primitives the local search consumes. Implemented on data by
/// DataLearner and on a known graph by the oracle suite.
class LocalLearner {
 public:
  virtual ~LocalLearner() = default;
  virtual std::size_t num_variables() const = 0;
  /// Candidate parents and children of z, ascending.
  virtual VarSet parents_and_children(VarIndex z, Diagnostics& diag) = 0;
  /// Symmetric-gain predicate: keep x as a neighbour of z.
  virtual bool keep_candidate(VarIndex z, VarIndex x, Diagnostics& diag) = 0;
  /// Positive iff x -> z <- y is preferred over the equivalence-class structures.
  virtual double collider_score(VarIndex x, VarIndex z, VarIndex y, Diagnostics& diag) = 0;
};

/// PC sets keyed by node, shareable across concurrent discoveries on the
/// same dataset and options.
class PcCache {
 public:
  std::optional<VarSet> find(VarIndex v) const;
  void insert(VarIndex v, VarSet pc);

 private:
  mutable std::mutex mutex_;
  std::unordered_map<VarIndex, VarSet> sets_;
};

/// Data-driven learner: G^2-based PC discovery, AIC/BDeu score predicates.
class DataLearner final : public LocalLearner {
 public:
  /// Caches are optional; when given they must belong to the same dataset
  /// and options and may be shared between threads.
  DataLearner(const Dataset& data, const HlcdOptions& options, std::shared_ptr<ScoreCache> scores = nullptr,
              std::shared_ptr<PcCache> pcs = nullptr);

  std::size_t num_variables() const override { return data_.num_variables(); }
  VarSet parents_and_children(VarIndex z, Diagnostics& diag) override;
  bool keep_candidate(VarIndex z, VarIndex x, Diagnostics& diag) override;
  double collider_score(VarIndex x, VarIndex z, VarIndex y, Diagnostics& diag) override;

  ScoreCache& scores() { return *scores_; }

 private:
  const Dataset& data_;
  HlcdOptions options_;
  G2Tester tester_;
  std::shared_ptr<ScoreCache> scores_;
  std::shared_ptr<PcCache> pcs_;
};

/// Members of pc_set that pass theorem1_holds against z, order preserved.
VarSet prune_theorem1(ScoreCache& cache, VarIndex z, const VarSet& pc_set, Diagnostics* diag = nullptr);
VarSet prune_theorem1(const Dataset& data, VarIndex z, const VarSet& pc_set, const ScoreConfig& config);

/// Strength of the evidence behind each directed edge, used to settle
/// conflicting collider orientations.
class OrientationEvidence {
 public:
  explicit OrientationEvidence(std::size_t num_nodes) : n_(num_nodes), strength_(num_nodes * num_nodes, 0.0) {}
  double get(VarIndex from, VarIndex to) const { return strength_[from * n_ + to]; }
  void set(VarIndex from, VarIndex to, double s) { strength_[from * n_ + to] = s; }

 private:
  std::size_t n_;
  std::vector<double> strength_;
};

/// Scores every pair of current neighbours of z and orients x -> z <- y where
/// the collider score is positive. A clash with an earlier orientation is
/// resolved in favour of the larger |score| and counted as a conflict; an
/// orientation that would close a directed cycle is dropped and counted.
/// Returns the (parent, z) pairs that end up oriented by this call.
std::vector<std::pair<VarIndex, VarIndex>> detect_v_structures(LocalLearner& learner, Pdag& pdag, VarIndex z,
                                                               const HlcdOptions& options, OrientationEvidence& evidence,
                                                               Diagnostics& diag);
std::vector<std::pair<VarIndex, VarIndex>> detect_v_structures(const Dataset& data, Pdag& pdag, VarIndex z,
                                                               const HlcdOptions& options);

struct NeighborClasses {
  VarSet parents;
  VarSet children;
  VarSet undirected;
};

NeighborClasses classify_neighbors(const Pdag& pdag, VarIndex target);

/// Local discovery around target: FIFO expansion from target, PC discovery,
/// symmetric-gain pruning, OR-rule skeleton, score-based collider detection
/// and Meek closure over visited nodes. Stops once every edge at target is
/// directed, the queue empties, or every variable has been visited.
LocalDiscoveryResult discover(LocalLearner& learner, VarIndex target, const HlcdOptions& options);
LocalDiscoveryResult discover(const Dataset& data, VarIndex target, const HlcdOptions& options);

}  // namespace hlcd
