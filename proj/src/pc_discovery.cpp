#include "hlcd/pc_discovery.hpp"

#include <algorithm>
#include <numeric>

#include <boost/container/small_vector.hpp>

namespace hlcd {

namespace {

// Calls visit(subset) for every size-k subset of items in lexicographic order
// until visit returns true. Returns whether any call returned true.
using SmallSet = boost::container::small_vector<VarIndex, 16>;

template <typename Items, typename Visit>
bool any_subset(const Items& items, std::size_t k, Visit&& visit) {
  if (k > items.size()) return false;
  boost::container::small_vector<std::size_t, 16> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  SmallSet subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
    if (visit(std::span<const VarIndex>(subset.data(), subset.size()))) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void check_target(std::size_t n, VarIndex target) {
  if (target >= n) throw Error("pc discovery: target index out of range");
}

SmallSet without(const std::vector<VarIndex>& items, VarIndex x) {
  SmallSet out;
  for (const VarIndex v : items)
    if (v != x) out.push_back(v);
  return out;
}

}  // namespace

PcAlgorithm parse_pc_algorithm(const std::string& text) {
  if (text == "pc-simple") return PcAlgorithm::kPcSimple;
  if (text == "hiton") return PcAlgorithm::kHitonPc;
  if (text == "fcbf") return PcAlgorithm::kFcbf;
  throw Error("unknown PC algorithm '" + text + "' (expected pc-simple, hiton or fcbf)");
}

std::string to_string(PcAlgorithm a) {
  switch (a) {
    case PcAlgorithm::kPcSimple: return "pc-simple";
    case PcAlgorithm::kHitonPc: return "hiton";
    case PcAlgorithm::kFcbf: return "fcbf";
  }
  return "?";
}

void PcOptions::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("pc options: alpha must lie in (0,1)");
  if (!(mi_threshold >= 0.0)) throw Error("pc options: mi_threshold must be >= 0");
}

VarSet pc_simple(CiTester& tester, VarIndex target, const PcOptions& options) {
  options.validate();
  const std::size_t n = tester.num_variables();
  check_target(n, target);
  std::vector<VarIndex> candidates;
  candidates.reserve(n);
  for (VarIndex v = 0; v < n; ++v) {
    if (v != target && !tester.test(target, v, {}).independent) candidates.push_back(v);
  }
  for (std::size_t level = 1;; ++level) {
    if (candidates.empty() || level > candidates.size() - 1) break;
    if (options.max_cond_size && level > *options.max_cond_size) break;
    for (std::size_t i = 0; i < candidates.size();) {
      const VarIndex x = candidates[i];
      const auto others = without(candidates, x);
      const bool separated = any_subset(others, level, [&](std::span<const VarIndex> z) {
        return tester.test(target, x, z).independent;
      });
      if (separated) {
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }
  return candidates;
}

VarSet pc_simple(const Dataset& data, VarIndex target, const PcOptions& options) {
  G2Tester tester(data, options.alpha, options.df_rule);
  return pc_simple(tester, target, options);
}

VarSet hiton_pc(CiTester& tester, VarIndex target, const PcOptions& options) {
  options.validate();
  const std::size_t n = tester.num_variables();
  check_target(n, target);

  struct Ranked {
    VarIndex var;
    double p_value;
    double statistic;
  };
  std::vector<Ranked> open;
  for (VarIndex v = 0; v < n; ++v) {
    if (v == target) continue;
    const CiDecision d = tester.test(target, v, {});
    if (!d.independent) open.push_back({v, d.p_value, d.statistic});
  }
  std::stable_sort(open.begin(), open.end(), [](const Ranked& a, const Ranked& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    return a.statistic > b.statistic;
  });

  std::vector<VarIndex> pc;  // admission order
  for (const auto& candidate : open) {
    pc.push_back(candidate.var);
    const std::vector<VarIndex> snapshot = pc;
    for (const VarIndex x : snapshot) {
      if (std::find(pc.begin(), pc.end(), x) == pc.end()) continue;
      auto others = without(pc, x);
      std::sort(others.begin(), others.end());
      std::size_t max_k = others.size();
      if (options.max_cond_size) max_k = std::min(max_k, *options.max_cond_size);
      for (std::size_t k = 1; k <= max_k; ++k) {
        const bool separated = any_subset(others, k, [&](std::span<const VarIndex> z) {
          return tester.test(target, x, z).independent;
        });
        if (separated) {
          pc.erase(std::find(pc.begin(), pc.end(), x));
          break;
        }
      }
    }
  }
  std::sort(pc.begin(), pc.end());
  return pc;
}

VarSet hiton_pc(const Dataset& data, VarIndex target, const PcOptions& options) {
  G2Tester tester(data, options.alpha, options.df_rule);
  return hiton_pc(tester, target, options);
}

VarSet fcbf_pc(const Dataset& data, VarIndex target, const PcOptions& options) {
  options.validate();
  const std::size_t n = data.num_variables();
  check_target(n, target);
  const bool use_su = options.relevance == RelevanceMeasure::kSymmetricUncertainty;
  auto measure = [&](VarIndex a, VarIndex b) {
    return use_su ? symmetric_uncertainty(data, a, b) : mutual_information(data, a, b);
  };

  std::vector<std::pair<VarIndex, double>> relevant;
  for (VarIndex v = 0; v < n; ++v) {
    if (v == target) continue;
    const double rel = measure(v, target);
    if (rel > options.mi_threshold) relevant.emplace_back(v, rel);
  }
  std::stable_sort(relevant.begin(), relevant.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<char> removed(relevant.size(), 0);
  for (std::size_t i = 0; i < relevant.size(); ++i) {
    if (removed[i]) continue;
    const VarIndex predominant = relevant[i].first;
    for (std::size_t j = i + 1; j < relevant.size(); ++j) {
      if (removed[j]) continue;
      if (measure(relevant[j].first, predominant) >= relevant[j].second) removed[j] = 1;
    }
  }
  VarSet out;
  for (std::size_t i = 0; i < relevant.size(); ++i)
    if (!removed[i]) out.push_back(relevant[i].first);
  std::sort(out.begin(), out.end());
  return out;
}

VarSet discover_pc(const Dataset& data, CiTester& tester, VarIndex target, const PcOptions& options) {
  switch (options.algorithm) {
    case PcAlgorithm::kPcSimple: return pc_simple(tester, target, options);
    case PcAlgorithm::kHitonPc: return hiton_pc(tester, target, options);
    case PcAlgorithm::kFcbf: return fcbf_pc(data, target, options);
  }
  throw Error("discover_pc: unknown algorithm");
}

Pdag or_merge(const std::map<VarIndex, VarSet>& pc_sets, std::size_t num_nodes) {
  Pdag out(num_nodes);
  for (const auto& [z, pc] : pc_sets) {
    if (z >= num_nodes) throw Error("or_merge: node index out of range");
    for (const VarIndex x : pc) {
      if (x >= num_nodes || x == z) throw Error("or_merge: invalid PC member");
      out.add_undirected(z, x);
    }
  }
  return out;
}

}  // namespace hlcd
