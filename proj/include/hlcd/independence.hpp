#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlcd/common.hpp"
#include "hlcd/dataset.hpp"

namespace hlcd {

struct CiResult {
  double statistic = 0.0;  // G^2
  std::size_t df = 1;
  double p_value = 1.0;
  /// False when N < 5 * df; such a test never certifies independence.
  bool reliable = true;
};

/// Upper tail of the chi-square distribution, Q(df/2, statistic/2).
double chi_square_upper_tail(double statistic, std::size_t df);

/// Degrees of freedom of the G^2 test.
///   full:   (r_x-1)(r_y-1) prod r_z
///   strata: (r_x-1)(r_y-1) times the number of non-empty z strata
///   levels: sum over non-empty strata of (seen x levels - 1)(seen y levels - 1)
enum class DfRule { kFull, kNonEmptyStrata, kObservedLevels };

DfRule parse_df_rule(const std::string& text);  // "full" | "strata" | "levels"
std::string to_string(DfRule rule);

/// G^2 test of x _||_ y | z. Cells with O = 0 contribute 0 and empty strata
/// are skipped; df follows `rule` and is clamped to >= 1. Symmetric in x and
/// y bit for bit.
CiResult g2_test(const Dataset& data, VarIndex x, VarIndex y, std::span<const VarIndex> z,
                 DfRule rule = DfRule::kFull);

/// True iff the test is reliable and p > alpha.
bool is_independent(const CiResult& result, double alpha);

/// Plug-in entropy in nats.
double entropy(const Dataset& data, VarIndex x);

/// Plug-in mutual information in nats; 2 N I(x;y) equals the unconditional G^2.
double mutual_information(const Dataset& data, VarIndex x, VarIndex y);

/// 2 I(x;y) / (H(x) + H(y)), or 0 when both entropies vanish.
double symmetric_uncertainty(const Dataset& data, VarIndex x, VarIndex y);

/// Outcome of a conditional independence query as seen by PC discovery.
struct CiDecision {
  bool independent = false;
  double p_value = 0.0;
  double statistic = 0.0;
};

/// Source of conditional independence decisions: data-driven or an oracle.
class CiTester {
 public:
  virtual ~CiTester() = default;
  virtual std::size_t num_variables() const = 0;
  virtual CiDecision test(VarIndex x, VarIndex y, std::span<const VarIndex> z) = 0;
  /// Number of distinct queries actually evaluated.
  virtual std::size_t tests_run() const = 0;
};

/// G^2 tests against a dataset at a fixed alpha, memoized per (x, y, z).
class G2Tester final : public CiTester {
 public:
  G2Tester(const Dataset& data, double alpha, DfRule df_rule = DfRule::kFull);

  std::size_t num_variables() const override { return data_.num_variables(); }
  CiDecision test(VarIndex x, VarIndex y, std::span<const VarIndex> z) override;
  std::size_t tests_run() const override { return tests_run_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept;
  };

  const Dataset& data_;
  double alpha_;
  DfRule df_rule_;
  std::size_t tests_run_ = 0;
  std::unordered_map<std::vector<std::uint32_t>, CiDecision, KeyHash> memo_;
};

}  // namespace hlcd
