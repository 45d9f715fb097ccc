#pragma once

#include <map>
#include <optional>
#include <string>

#include "hlcd/common.hpp"
#include "hlcd/dataset.hpp"
#include "hlcd/independence.hpp"
#include "hlcd/pdag.hpp"

namespace hlcd {

enum class PcAlgorithm { kPcSimple, kHitonPc, kFcbf };

PcAlgorithm parse_pc_algorithm(const std::string& text);  // "pc-simple" | "hiton" | "fcbf"
std::string to_string(PcAlgorithm a);

/// Relevance measure FCBF thresholds against mi_threshold.
enum class RelevanceMeasure { kSymmetricUncertainty, kMutualInformation };

struct PcOptions {
  PcAlgorithm algorithm = PcAlgorithm::kPcSimple;
  double alpha = 0.01;
  /// FCBF relevance threshold (SU by default, nats when relevance is MI).
  double mi_threshold = 0.03;
  RelevanceMeasure relevance = RelevanceMeasure::kSymmetricUncertainty;
  /// Largest conditioning set; unset means bounded only by the candidate set.
  std::optional<std::size_t> max_cond_size;
  /// Degrees-of-freedom convention of the G^2 test used by PC-simple and HITON-PC.
  DfRule df_rule = DfRule::kObservedLevels;

  void validate() const;
};

/// PC-simple: marginal screen, then for l = 1, 2, ... drop any candidate made
/// independent of target by an l-subset of the remaining candidates.
/// Candidates are scanned ascending and subsets enumerated lexicographically.
VarSet pc_simple(CiTester& tester, VarIndex target, const PcOptions& options);
VarSet pc_simple(const Dataset& data, VarIndex target, const PcOptions& options);

/// HITON-PC: admit marginally dependent variables strongest first (p-value
/// ascending, statistic descending, index ascending) and after each admission
/// eliminate members separated from target by a subset of the others.
VarSet hiton_pc(CiTester& tester, VarIndex target, const PcOptions& options);
VarSet hiton_pc(const Dataset& data, VarIndex target, const PcOptions& options);

/// FCBF: relevance filter on SU (or MI), then redundancy filter against
/// predominant features in descending relevance order.
VarSet fcbf_pc(const Dataset& data, VarIndex target, const PcOptions& options);

/// Runs the algorithm selected in options. FCBF needs the dataset, so the
/// tester-only overload rejects it.
VarSet discover_pc(const Dataset& data, CiTester& tester, VarIndex target, const PcOptions& options);

/// Skeleton under the OR rule: x - z iff x in pc(z) or z in pc(x).
Pdag or_merge(const std::map<VarIndex, VarSet>& pc_sets, std::size_t num_nodes);

}  // namespace hlcd
