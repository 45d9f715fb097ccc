#include "hlcd/independence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

namespace hlcd {

namespace {

void check_pair(const Dataset& data, VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  const std::size_t n = data.num_variables();
  if (x >= n || y >= n) throw Error("ci test: index out of range");
  if (x == y) throw Error("ci test: x and y must differ");
  for (const VarIndex v : z) {
    if (v >= n) throw Error("ci test: conditioning index out of range");
    if (v == x || v == y) throw Error("ci test: x and y must not be in the conditioning set");
  }
}

// Dense stratum index per row; strata are numbered in order of first
// appearance so the table never exceeds N strata.
std::size_t stratify(const Dataset& data, std::span<const VarIndex> z, std::vector<std::uint32_t>& stratum) {
  const std::size_t rows = data.num_rows();
  stratum.assign(rows, 0);
  if (z.empty()) return 1;
  std::vector<std::uint64_t> key(rows, 0);
  std::uint64_t space = 1;
  for (const VarIndex v : z) {
    const std::uint64_t r = data.arity(v);
    const auto col = data.column(v);
    for (std::size_t i = 0; i < rows; ++i) key[i] = key[i] * r + static_cast<std::uint64_t>(col[i]);
    space *= r;
    if (space > (std::uint64_t{1} << 40)) {
      // Re-rank to keep keys small.
      std::unordered_map<std::uint64_t, std::uint64_t> rank;
      for (auto& k : key) k = rank.emplace(k, rank.size()).first->second;
      space = rank.size();
    }
  }
  if (space <= 4 * rows + 64) {
    std::vector<std::int64_t> id(space, -1);
    std::size_t next = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      auto& slot = id[key[i]];
      if (slot < 0) slot = static_cast<std::int64_t>(next++);
      stratum[i] = static_cast<std::uint32_t>(slot);
    }
    return next;
  }
  std::unordered_map<std::uint64_t, std::uint32_t> id;
  for (std::size_t i = 0; i < rows; ++i) {
    stratum[i] = id.emplace(key[i], static_cast<std::uint32_t>(id.size())).first->second;
  }
  return id.size();
}

struct G2Parts {
  double half = 0.0;  // sum over cells of O * ln(O * N_s / (N_a,s * N_b,s))
  std::size_t nonempty_strata = 0;
  std::size_t observed_df = 0;  // sum over strata of (seen x levels - 1)(seen y levels - 1)
};

G2Parts g2_parts(const Dataset& data, VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  const std::size_t rx = data.arity(x);
  const std::size_t ry = data.arity(y);
  std::vector<std::uint32_t> stratum;
  const std::size_t strata = stratify(data, z, stratum);
  const std::size_t cells = rx * ry;
  std::vector<std::int64_t> joint(strata * cells, 0);
  const auto cx = data.column(x);
  const auto cy = data.column(y);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    ++joint[stratum[i] * cells + static_cast<std::size_t>(cx[i]) * ry + static_cast<std::size_t>(cy[i])];
  }
  std::vector<std::int64_t> nx(rx);
  std::vector<std::int64_t> ny(ry);
  G2Parts parts;
  double sum = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    const std::int64_t* t = &joint[s * cells];
    std::fill(nx.begin(), nx.end(), 0);
    std::fill(ny.begin(), ny.end(), 0);
    std::int64_t ns = 0;
    for (std::size_t a = 0; a < rx; ++a) {
      for (std::size_t b = 0; b < ry; ++b) {
        nx[a] += t[a * ry + b];
        ny[b] += t[a * ry + b];
      }
      ns += nx[a];
    }
    if (ns == 0) continue;
    ++parts.nonempty_strata;
    const auto seen_x = static_cast<std::size_t>(std::count_if(nx.begin(), nx.end(), [](auto c) { return c > 0; }));
    const auto seen_y = static_cast<std::size_t>(std::count_if(ny.begin(), ny.end(), [](auto c) { return c > 0; }));
    parts.observed_df += (seen_x - 1) * (seen_y - 1);
    for (std::size_t a = 0; a < rx; ++a) {
      for (std::size_t b = 0; b < ry; ++b) {
        const std::int64_t o = t[a * ry + b];
        if (o == 0) continue;
        const double od = static_cast<double>(o);
        sum += od * std::log(od * static_cast<double>(ns) / (static_cast<double>(nx[a]) * static_cast<double>(ny[b])));
      }
    }
  }
  parts.half = sum;
  return parts;
}

}  // namespace

double chi_square_upper_tail(double statistic, std::size_t df) {
  if (df == 0) throw Error("chi_square_upper_tail: df must be positive");
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(static_cast<double>(df) / 2.0, statistic / 2.0);
}

DfRule parse_df_rule(const std::string& text) {
  if (text == "full") return DfRule::kFull;
  if (text == "strata") return DfRule::kNonEmptyStrata;
  if (text == "levels") return DfRule::kObservedLevels;
  throw Error("unknown df rule '" + text + "' (expected full, strata or levels)");
}

std::string to_string(DfRule rule) {
  switch (rule) {
    case DfRule::kFull: return "full";
    case DfRule::kNonEmptyStrata: return "strata";
    case DfRule::kObservedLevels: return "levels";
  }
  return "?";
}

CiResult g2_test(const Dataset& data, VarIndex x, VarIndex y, std::span<const VarIndex> z, DfRule rule) {
  check_pair(data, x, y, z);
  if (x > y) std::swap(x, y);
  std::vector<VarIndex> zs(z.begin(), z.end());
  std::sort(zs.begin(), zs.end());

  CiResult result;
  const G2Parts parts = g2_parts(data, x, y, zs);
  result.statistic = std::max(0.0, 2.0 * parts.half);
  std::size_t df = (data.arity(x) - 1) * (data.arity(y) - 1);
  switch (rule) {
    case DfRule::kFull:
      for (const VarIndex v : zs) df *= data.arity(v);
      break;
    case DfRule::kNonEmptyStrata:
      df *= parts.nonempty_strata;
      break;
    case DfRule::kObservedLevels:
      df = parts.observed_df;
      break;
  }
  result.df = std::max<std::size_t>(df, 1);
  result.p_value = chi_square_upper_tail(result.statistic, result.df);
  result.reliable = data.num_rows() >= 5 * result.df;
  return result;
}

bool is_independent(const CiResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("is_independent: alpha must lie in (0,1)");
  return result.reliable && result.p_value > alpha;
}

double entropy(const Dataset& data, VarIndex x) {
  const auto counts = marginal_counts(data, x);
  const double n = static_cast<double>(data.num_rows());
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(const Dataset& data, VarIndex x, VarIndex y) {
  check_pair(data, x, y, {});
  if (x > y) std::swap(x, y);
  const double mi = g2_parts(data, x, y, {}).half / static_cast<double>(data.num_rows());
  return std::max(0.0, mi);
}

double symmetric_uncertainty(const Dataset& data, VarIndex x, VarIndex y) {
  const double hx = entropy(data, x);
  const double hy = entropy(data, y);
  if (hx + hy <= 0.0) return 0.0;
  return std::clamp(2.0 * mutual_information(data, x, y) / (hx + hy), 0.0, 1.0);
}

std::size_t G2Tester::KeyHash::operator()(const std::vector<std::uint32_t>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto k : key) {
    h ^= k;
    h *= 0x100000001b3ULL;
  }
  return h;
}

G2Tester::G2Tester(const Dataset& data, double alpha, DfRule df_rule)
    : data_(data), alpha_(alpha), df_rule_(df_rule) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("G2Tester: alpha must lie in (0,1)");
}

CiDecision G2Tester::test(VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  std::vector<std::uint32_t> key;
  key.reserve(z.size() + 2);
  key.push_back(static_cast<std::uint32_t>(std::min(x, y)));
  key.push_back(static_cast<std::uint32_t>(std::max(x, y)));
  for (const VarIndex v : z) key.push_back(static_cast<std::uint32_t>(v));
  std::sort(key.begin() + 2, key.end());
  if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
  const CiResult r = g2_test(data_, x, y, z, df_rule_);
  ++tests_run_;
  const CiDecision d{is_independent(r, alpha_), r.p_value, r.statistic};
  memo_.emplace(std::move(key), d);
  return d;
}

}  // namespace hlcd
