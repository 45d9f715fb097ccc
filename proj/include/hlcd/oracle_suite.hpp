#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlcd/hlcd_engine.hpp"
#include "hlcd/independence.hpp"
#include "hlcd/network.hpp"
#include "hlcd/pdag.hpp"

namespace hlcd {

/// Conditional independence read off the graph by d-separation. Memoizes one
/// reachability sweep per (x, z) for graphs with at most 58 nodes.
class DSeparationTester final : public CiTester {
 public:
  explicit DSeparationTester(const Dag& dag);

  std::size_t num_variables() const override { return dag_.num_nodes(); }
  CiDecision test(VarIndex x, VarIndex y, std::span<const VarIndex> z) override;
  std::size_t tests_run() const override { return tests_run_; }
  /// Bit p of parent_masks()[v] is set iff p->v. Empty above 58 nodes.
  std::span<const std::uint64_t> parent_masks() const { return parent_masks_; }

 private:
  const Dag& dag_;
  std::size_t tests_run_ = 0;
  std::vector<std::uint64_t> parent_masks_;
  std::vector<std::uint64_t> child_masks_;
  // Sweep results keyed by (z_mask, x): a flat table for small graphs, a hash
  // map up to 58 nodes.
  std::vector<std::uint64_t> table_;
  std::unordered_map<std::uint64_t, std::uint64_t> sweeps_;
};

/// Learner whose three primitives come from the true graph: d-separation for
/// CI tests, true adjacency for the symmetric-gain predicate, and +1/-1 for
/// unshielded colliders. PC sets are memoized across targets.
class GraphLearner final : public LocalLearner {
 public:
  GraphLearner(const Dag& dag, const PcOptions& options);

  std::size_t num_variables() const override { return dag_.num_nodes(); }
  VarSet parents_and_children(VarIndex z, Diagnostics& diag) override;
  bool keep_candidate(VarIndex z, VarIndex x, Diagnostics& diag) override;
  double collider_score(VarIndex x, VarIndex z, VarIndex y, Diagnostics& diag) override;

 private:
  const Dag& dag_;
  PcOptions options_;
  DSeparationTester tester_;
  std::vector<std::optional<VarSet>> pc_cache_;
};

/// discover() with every data-driven primitive replaced by its graph oracle.
LocalDiscoveryResult oracle_discover(const Dag& dag, VarIndex target, const HlcdOptions& options = {});
LocalDiscoveryResult oracle_discover(const Network& net, VarIndex target, const HlcdOptions& options = {});

/// Number of labeled DAGs on k nodes (OEIS A003024).
std::uint64_t count_dags(std::size_t k);

/// Calls visit once per labeled DAG on k <= 8 nodes. Node v's parents are the
/// set bits of parent_masks[v].
void enumerate_dag_masks(std::size_t k, const std::function<void(std::span<const std::uint64_t> parent_masks)>& visit);
void enumerate_dags(std::size_t k, const std::function<void(const Dag&)>& visit);

Dag dag_from_masks(std::span<const std::uint64_t> parent_masks);

/// CPDAG by exhaustive search: every orientation of the skeleton that is
/// acyclic and has the same unshielded colliders belongs to the class, and an
/// edge stays directed iff all members agree. Skeletons with more than 20
/// edges are rejected.
Pdag brute_force_cpdag(const Dag& dag);

/// All DAGs on k <= 5 nodes grouped by Markov equivalence class.
std::vector<std::vector<Dag>> equivalence_classes(std::size_t k);

struct FuzzReport {
  std::size_t trials = 0;
  /// Largest |a - b| / max(1, |a|, |b|) seen for each identity, over both criteria.
  double theorem1_gain_symmetry = 0.0;
  double collider_symmetry = 0.0;
  double aic_gain_vs_mi = 0.0;
  double equivalence_ties = 0.0;

  double max_deviation() const;
};

struct FuzzOptions {
  std::size_t min_rows = 4;
  std::size_t max_rows = 500;
  std::size_t min_arity = 2;
  std::size_t max_arity = 4;
  /// Check score ties across every equivalence class on up to this many nodes.
  std::size_t equivalence_nodes = 4;
};

/// Random small datasets checked against the score identities. Deterministic
/// given seed; trials = 0 yields an empty report.
FuzzReport fuzz_score_identities(std::size_t trials, std::uint64_t seed, const FuzzOptions& options = {});

struct VerifyOptions {
  std::size_t max_nodes = 6;
  std::vector<std::string> network_paths;
  std::size_t fuzz_trials = 1000;
  std::uint64_t seed = 1;
  /// Worker threads for the exhaustive enumeration.
  std::size_t threads = 1;
  HlcdOptions hlcd;
};

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

/// Runs the oracle checks: exact local CPDAG recovery on every enumerated DAG
/// and every listed network, brute-force vs Meek CPDAG agreement, and score
/// identity fuzzing. log receives one progress line per check when set.
VerifyReport verify(const VerifyOptions& options, const std::function<void(const std::string&)>& log = {});

}  // namespace hlcd
