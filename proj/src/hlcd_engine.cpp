#include "hlcd/hlcd_engine.hpp"

#include <algorithm>
#include <cmath>

#include "hlcd/meek.hpp"

namespace hlcd {

void HlcdOptions::validate() const {
  pc.validate();
  score.validate();
}

std::optional<VarSet> PcCache::find(VarIndex v) const {
  std::lock_guard lock(mutex_);
  if (const auto it = sets_.find(v); it != sets_.end()) return it->second;
  return std::nullopt;
}

void PcCache::insert(VarIndex v, VarSet pc) {
  std::lock_guard lock(mutex_);
  sets_.emplace(v, std::move(pc));
}

DataLearner::DataLearner(const Dataset& data, const HlcdOptions& options, std::shared_ptr<ScoreCache> scores,
                         std::shared_ptr<PcCache> pcs)
    : data_(data), options_(options), tester_(data, options.pc.alpha, options.pc.df_rule), scores_(std::move(scores)), pcs_(std::move(pcs)) {
  options_.validate();
  if (!scores_) scores_ = std::make_shared<ScoreCache>(data_, options_.score);
  if (&scores_->data() != &data_) throw Error("DataLearner: score cache belongs to another dataset");
}

VarSet DataLearner::parents_and_children(VarIndex z, Diagnostics& diag) {
  if (pcs_) {
    if (auto hit = pcs_->find(z)) return *std::move(hit);
  }
  const std::size_t before = tester_.tests_run();
  VarSet pc = discover_pc(data_, tester_, z, options_.pc);
  diag.ci_tests += tester_.tests_run() - before;
  if (pcs_) pcs_->insert(z, pc);
  return pc;
}

bool DataLearner::keep_candidate(VarIndex z, VarIndex x, Diagnostics& diag) {
  const std::size_t before = scores_->evaluations();
  const Theorem1Check check = theorem1_holds(*scores_, x, z);
  diag.score_evaluations += scores_->evaluations() - before;
  if (!check.identity_holds) ++diag.identity_violations;
  return check.keep;
}

double DataLearner::collider_score(VarIndex x, VarIndex z, VarIndex y, Diagnostics& diag) {
  const std::size_t before = scores_->evaluations();
  const double s = collider_statistic(*scores_, x, z, y);
  diag.score_evaluations += scores_->evaluations() - before;
  return s;
}

VarSet prune_theorem1(ScoreCache& cache, VarIndex z, const VarSet& pc_set, Diagnostics* diag) {
  VarSet kept;
  for (const VarIndex x : pc_set) {
    if (x == z) throw Error("prune_theorem1: z appears in its own PC set");
    const Theorem1Check check = theorem1_holds(cache, x, z);
    if (diag && !check.identity_holds) ++diag->identity_violations;
    if (check.keep) {
      kept.push_back(x);
    } else if (diag) {
      ++diag->theorem1_removals;
    }
  }
  return kept;
}

VarSet prune_theorem1(const Dataset& data, VarIndex z, const VarSet& pc_set, const ScoreConfig& config) {
  ScoreCache cache(data, config);
  return prune_theorem1(cache, z, pc_set);
}

namespace {

// Directs from -> to with the given evidence. Returns true if the edge ends up
// directed that way.
bool orient_with_evidence(Pdag& pdag, VarIndex from, VarIndex to, double strength, OrientationEvidence& evidence,
                          Diagnostics& diag) {
  if (pdag.directed(from, to)) {
    evidence.set(from, to, std::max(evidence.get(from, to), strength));
    return true;
  }
  if (pdag.directed(to, from)) {
    ++diag.orientation_conflicts;
    if (strength <= evidence.get(to, from)) return false;
    pdag.set_undirected(from, to);
    if (pdag.has_directed_path(to, from)) {
      pdag.set_directed(to, from);
      return false;
    }
    pdag.set_directed(from, to);
    evidence.set(to, from, 0.0);
    evidence.set(from, to, strength);
    return true;
  }
  if (pdag.has_directed_path(to, from)) {
    ++diag.orientation_conflicts;
    return false;
  }
  pdag.set_directed(from, to);
  evidence.set(from, to, strength);
  return true;
}

bool all_edges_directed(const Pdag& pdag, VarIndex target) {
  for (VarIndex v = 0; v < pdag.num_nodes(); ++v)
    if (pdag.undirected(target, v)) return false;
  return true;
}

}  // namespace

std::vector<std::pair<VarIndex, VarIndex>> detect_v_structures(LocalLearner& learner, Pdag& pdag, VarIndex z,
                                                               const HlcdOptions& options, OrientationEvidence& evidence,
                                                               Diagnostics& diag) {
  std::vector<std::pair<VarIndex, VarIndex>> oriented;
  const VarSet nb = pdag.neighbors(z);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      const VarIndex x = nb[i];
      const VarIndex y = nb[j];
      if (options.require_nonadjacent_pairs && pdag.adjacent(x, y)) continue;
      const double s = learner.collider_score(x, z, y, diag);
      if (!(s > 0.0)) continue;
      ++diag.v_structures;
      const double strength = std::abs(s);
      if (orient_with_evidence(pdag, x, z, strength, evidence, diag)) oriented.emplace_back(x, z);
      if (orient_with_evidence(pdag, y, z, strength, evidence, diag)) oriented.emplace_back(y, z);
    }
  }
  std::sort(oriented.begin(), oriented.end());
  oriented.erase(std::unique(oriented.begin(), oriented.end()), oriented.end());
  return oriented;
}

std::vector<std::pair<VarIndex, VarIndex>> detect_v_structures(const Dataset& data, Pdag& pdag, VarIndex z,
                                                               const HlcdOptions& options) {
  DataLearner learner(data, options);
  OrientationEvidence evidence(pdag.num_nodes());
  Diagnostics diag;
  return detect_v_structures(learner, pdag, z, options, evidence, diag);
}

NeighborClasses classify_neighbors(const Pdag& pdag, VarIndex target) {
  if (target >= pdag.num_nodes()) throw Error("classify_neighbors: target out of range");
  return {pdag.parents(target), pdag.children(target), pdag.undirected_neighbors(target)};
}

LocalDiscoveryResult discover(LocalLearner& learner, VarIndex target, const HlcdOptions& options) {
  const std::size_t n = learner.num_variables();
  if (target >= n) throw Error("discover: unknown target");

  LocalDiscoveryResult result;
  result.target = target;
  result.pdag = Pdag(n);
  Pdag& pdag = result.pdag;
  Diagnostics& diag = result.diagnostics;
  OrientationEvidence evidence(n);
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<std::uint8_t> queued(n, 0);
  result.visited.reserve(n);
  std::vector<VarIndex> queue{target};
  queue.reserve(n);
  std::size_t head = 0;
  queued[target] = 1;

  MeekOptions meek;
  meek.known = visited;
  meek.throw_on_cycle = false;

  while (head < queue.size()) {
    const VarIndex z = queue[head++];
    if (visited[z]) continue;
    ++diag.iterations;

    // Skeleton step.
    const VarSet pc = learner.parents_and_children(z, diag);
    ++diag.pc_discoveries;
    visited[z] = 1;
    result.visited.push_back(z);
    for (const VarIndex x : pc) {
      if (learner.keep_candidate(z, x, diag)) {
        pdag.add_undirected(z, x);
        if (!visited[x] && !queued[x]) {
          queued[x] = 1;
          queue.push_back(x);
        }
      } else {
        ++diag.theorem1_removals;
      }
    }

    // Orientation step.
    detect_v_structures(learner, pdag, z, options, evidence, diag);
    const MeekStats stats = meek_orient_in_place(pdag, meek);
    diag.meek_orientations += stats.oriented;
    diag.orientation_conflicts += stats.cycles_avoided;

    if (all_edges_directed(pdag, target)) break;
  }

  auto classes = classify_neighbors(pdag, target);
  result.parents = std::move(classes.parents);
  result.children = std::move(classes.children);
  result.undirected = std::move(classes.undirected);
  return result;
}

LocalDiscoveryResult discover(const Dataset& data, VarIndex target, const HlcdOptions& options) {
  if (target >= data.num_variables()) throw Error("discover: unknown target");
  DataLearner learner(data, options);
  return discover(learner, target, options);
}

}  // namespace hlcd
