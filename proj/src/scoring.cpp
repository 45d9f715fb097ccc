#include "hlcd/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/special_functions/gamma.hpp>

#include "hlcd/network.hpp"

namespace hlcd {

Criterion parse_criterion(const std::string& text) {
  if (text == "aic") return Criterion::kAic;
  if (text == "bdeu") return Criterion::kBdeu;
  throw Error("unknown score criterion '" + text + "' (expected aic or bdeu)");
}

std::string to_string(Criterion c) { return c == Criterion::kAic ? "aic" : "bdeu"; }

void ScoreConfig::validate() const {
  if (!(ess > 0.0)) throw Error("score config: ess must be > 0");
  if (!(eq_tol > 0.0)) throw Error("score config: eq_tol must be > 0");
}

double local_score(const ContingencyTable& table, const ScoreConfig& config) {
  const std::size_t q = table.num_configs;
  const std::size_t r = table.child_arity;
  double score = 0.0;
  if (config.criterion == Criterion::kAic) {
    for (std::size_t j = 0; j < q; ++j) {
      const std::int64_t nj = table.config_totals[j];
      if (nj == 0) continue;
      const double log_nj = std::log(static_cast<double>(nj));
      for (std::size_t k = 0; k < r; ++k) {
        const std::int64_t njk = table.at(j, k);
        if (njk == 0) continue;
        score += static_cast<double>(njk) * (std::log(static_cast<double>(njk)) - log_nj);
      }
    }
    score -= static_cast<double>((r - 1) * q);
    return score;
  }

  const double a_j = config.ess / static_cast<double>(q);
  const double a_jk = a_j / static_cast<double>(r);
  const double lg_a_j = boost::math::lgamma(a_j);
  const double lg_a_jk = boost::math::lgamma(a_jk);
  for (std::size_t j = 0; j < q; ++j) {
    const std::int64_t nj = table.config_totals[j];
    if (nj == 0) continue;
    score += lg_a_j - boost::math::lgamma(static_cast<double>(nj) + a_j);
    for (std::size_t k = 0; k < r; ++k) {
      const std::int64_t njk = table.at(j, k);
      if (njk == 0) continue;
      score += boost::math::lgamma(static_cast<double>(njk) + a_jk) - lg_a_jk;
    }
  }
  return score;
}

double local_score(const Dataset& data, VarIndex child, std::span<const VarIndex> parents, const ScoreConfig& config) {
  config.validate();
  return local_score(count(data, child, parents), config);
}

std::size_t ScoreCache::KeyHash::operator()(const std::vector<std::uint32_t>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto k : key) {
    h ^= k;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ScoreCache::ScoreCache(const Dataset& data, ScoreConfig config) : data_(data), config_(config) {
  config_.validate();
}

double ScoreCache::score(VarIndex child, std::span<const VarIndex> parents) {
  std::vector<std::uint32_t> key;
  key.reserve(parents.size() + 1);
  key.push_back(static_cast<std::uint32_t>(child));
  for (const VarIndex p : parents) key.push_back(static_cast<std::uint32_t>(p));
  std::sort(key.begin() + 1, key.end());
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const std::vector<VarIndex> sorted(key.begin() + 1, key.end());
  const double value = local_score(count(data_, child, sorted), config_);
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  std::unique_lock lock(mutex_);
  cache_.emplace(std::move(key), value);
  return value;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double gain(ScoreCache& cache, VarIndex x, VarIndex t) {
  const VarIndex parent[] = {x};
  return cache.score(t, parent) - cache.score(t);
}

double gain(const Dataset& data, VarIndex x, VarIndex t, const ScoreConfig& config) {
  ScoreCache cache(data, config);
  return gain(cache, x, t);
}

Theorem1Check theorem1_holds(ScoreCache& cache, VarIndex x, VarIndex t) {
  if (x == t) throw Error("theorem1_holds: x and t must differ");
  Theorem1Check out;
  out.gain_xt = gain(cache, x, t);
  out.gain_tx = gain(cache, t, x);
  const double scale = std::max({1.0, std::abs(out.gain_xt), std::abs(out.gain_tx)});
  out.identity_holds = std::abs(out.gain_xt - out.gain_tx) <= cache.config().eq_tol * scale;
  out.keep = out.identity_holds && out.gain_xt > 0.0;
  return out;
}

Theorem1Check theorem1_holds(const Dataset& data, VarIndex x, VarIndex t, const ScoreConfig& config) {
  ScoreCache cache(data, config);
  return theorem1_holds(cache, x, t);
}

double collider_statistic(ScoreCache& cache, VarIndex x, VarIndex z, VarIndex y) {
  if (x == y || x == z || y == z) throw Error("collider_statistic: x, z, y must be distinct");
  const VarIndex both[] = {x, y};
  const VarIndex only_x[] = {x};
  const VarIndex only_y[] = {y};
  return (cache.score(z, both) - cache.score(z, only_y)) - (cache.score(z, only_x) - cache.score(z));
}

double collider_statistic(const Dataset& data, VarIndex x, VarIndex z, VarIndex y, const ScoreConfig& config) {
  ScoreCache cache(data, config);
  return collider_statistic(cache, x, z, y);
}

double graph_score(ScoreCache& cache, const Dag& dag) {
  if (dag.num_nodes() != cache.data().num_variables()) throw Error("graph_score: graph/data size mismatch");
  double total = 0.0;
  for (VarIndex v = 0; v < dag.num_nodes(); ++v) total += cache.score(v, dag.parents(v));
  return total;
}

double graph_score(const Dataset& data, const Dag& dag, const ScoreConfig& config) {
  ScoreCache cache(data, config);
  return graph_score(cache, dag);
}

}  // namespace hlcd
