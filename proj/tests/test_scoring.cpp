#include <gtest/gtest.h>

#include <cmath>

#include "hlcd/network.hpp"
#include "hlcd/rng.hpp"
#include "hlcd/scoring.hpp"
#include "support.hpp"

namespace hlcd {
namespace {

// Direct evaluation over rows, independent of ContingencyTable.
double reference_score(const Dataset& d, VarIndex child, const std::vector<VarIndex>& parents, Criterion c,
                       double ess) {
  std::map<std::vector<std::int32_t>, std::vector<double>> table;
  const std::size_t r = d.arity(child);
  std::size_t q = 1;
  for (const VarIndex p : parents) q *= d.arity(p);
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    std::vector<std::int32_t> key;
    for (const VarIndex p : parents) key.push_back(d.value(i, p));
    auto& row = table[key];
    row.resize(r, 0.0);
    row[d.value(i, child)] += 1;
  }
  double s = 0.0;
  for (const auto& [key, row] : table) {
    double nj = 0.0;
    for (const double x : row) nj += x;
    if (c == Criterion::kAic) {
      for (const double x : row)
        if (x > 0) s += x * std::log(x / nj);
    } else {
      const double aj = ess / static_cast<double>(q);
      const double ajk = ess / static_cast<double>(q * r);
      s += std::lgamma(aj) - std::lgamma(nj + aj);
      for (const double x : row) s += std::lgamma(x + ajk) - std::lgamma(ajk);
    }
  }
  if (c == Criterion::kAic) s -= static_cast<double>((r - 1) * q);
  return s;
}

Dataset random_data(std::size_t rows, const std::vector<std::size_t>& arities, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<std::vector<std::int32_t>> data(rows, std::vector<std::int32_t>(arities.size()));
  for (auto& r : data)
    for (std::size_t v = 0; v < arities.size(); ++v) {
      const auto prev = v ? static_cast<std::uint64_t>(r[v - 1]) : 0;
      r[v] = static_cast<std::int32_t>((rng() % 2 ? prev : rng()) % arities[v]);
    }
  return test::from_rows(data, arities);
}

ScoreConfig config(Criterion c, double ess = 1.0) {
  ScoreConfig cfg;
  cfg.criterion = c;
  cfg.ess = ess;
  return cfg;
}

TEST(LocalScore, AicSingleBinary) {
  const Dataset d = test::from_rows({{0}, {0}, {1}, {1}});
  EXPECT_NEAR(local_score(d, 0, {}, config(Criterion::kAic)), 4.0 * std::log(0.5) - 1.0, 1e-12);
}

TEST(LocalScore, AicDeterministicCopy) {
  const Dataset d = test::from_rows({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  const VarIndex x[] = {0};
  EXPECT_NEAR(local_score(d, 1, x, config(Criterion::kAic)), -2.0, 1e-12);
}

TEST(LocalScore, BdeuSingleBinary) {
  const Dataset d = test::from_rows({{0}, {1}});
  const double by_gamma = std::lgamma(1.0) - std::lgamma(3.0) + 2.0 * (std::lgamma(1.5) - std::lgamma(0.5));
  EXPECT_NEAR(local_score(d, 0, {}, config(Criterion::kBdeu)), by_gamma, 1e-12);
  EXPECT_NEAR(by_gamma, -3.0 * std::log(2.0), 1e-12);
}

TEST(LocalScore, MatchesRowwiseReference) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Dataset d = random_data(3 + seed * 11, {2, 3, 4, 2}, seed);
    for (const Criterion c : {Criterion::kAic, Criterion::kBdeu}) {
      const double ess = 0.5 + static_cast<double>(seed % 4);
      const std::vector<VarIndex> parents = {0, 2};
      const double got = local_score(d, 3, parents, config(c, ess));
      EXPECT_NEAR(got, reference_score(d, 3, parents, c, ess), 1e-9 * std::max(1.0, std::abs(got)));
    }
  }
}

TEST(LocalScore, UnobservedParentConfigurationsContributeNothing) {
  const Dataset d = test::from_rows({{0, 0}, {0, 1}}, {5, 2});
  const VarIndex x[] = {0};
  const double s = local_score(d, 1, x, config(Criterion::kBdeu));
  EXPECT_NEAR(s, reference_score(d, 1, {0}, Criterion::kBdeu, 1.0), 1e-12);
}

TEST(ScoreConfig, Validation) {
  EXPECT_EQ(parse_criterion("aic"), Criterion::kAic);
  EXPECT_EQ(to_string(Criterion::kBdeu), "bdeu");
  EXPECT_THROW(parse_criterion("bic"), Error);
  ScoreConfig bad;
  bad.ess = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ScoreCache, HitsEqualRecomputation) {
  const Dataset d = random_data(60, {2, 3, 2, 2}, 3);
  ScoreCache cache(d, config(Criterion::kBdeu));
  const VarIndex ab[] = {2, 0};
  const VarIndex ba[] = {0, 2};
  const double first = cache.score(3, ab);
  EXPECT_EQ(cache.score(3, ba), first);
  EXPECT_EQ(cache.evaluations(), 1u);
  EXPECT_EQ(first, local_score(d, 3, ba, cache.config()));
}

TEST(Gain, CopyUnderAic) {
  const Dataset d = test::from_rows({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  EXPECT_NEAR(gain(d, 0, 1, config(Criterion::kAic)), 4.0 * std::log(2.0) - 1.0, 1e-12);
}

TEST(Gain, IndependentCountsUnderAic) {
  const Dataset d = test::from_rows(test::repeat({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}}, 4));
  EXPECT_NEAR(gain(d, 0, 1, config(Criterion::kAic)), -2.0, 1e-12);
}

TEST(Gain, SymmetricForBothCriteria) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dataset d = random_data(2 + seed * 7, {2 + seed % 3, 2 + seed % 4}, seed);
    for (const Criterion c : {Criterion::kAic, Criterion::kBdeu}) {
      const auto cfg = config(c, 0.5 + static_cast<double>(seed % 5));
      const double a = gain(d, 0, 1, cfg);
      const double b = gain(d, 1, 0, cfg);
      EXPECT_LE(std::abs(a - b), 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
}

TEST(Theorem1Holds, CopyIsKept) {
  const Dataset d = test::from_rows(test::repeat({{0, 0}, {1, 1}}, 50));
  const Theorem1Check check = theorem1_holds(d, 0, 1, config(Criterion::kAic));
  EXPECT_TRUE(check.keep);
  EXPECT_TRUE(check.identity_holds);
  EXPECT_NEAR(check.gain_xt, 100.0 * std::log(2.0) - 1.0, 1e-9);
}

TEST(Theorem1Holds, IndependentPairDeleted) {
  // Keep requires G^2 > 2 under AIC (P(chi2_1 > 2) = 0.157) and roughly
  // G^2 > ln N under BDeu (about 0.01 at N = 1000).
  const Network net = test::xor_network(test::make_dag(2, {}), 0.5);
  std::size_t aic_deleted = 0;
  std::size_t bdeu_deleted = 0;
  constexpr std::size_t kTrials = 200;
  for (std::size_t s = 0; s < kTrials; ++s) {
    const Dataset d = forward_sample(net, 1000, s);
    if (!theorem1_holds(d, 0, 1, config(Criterion::kAic)).keep) ++aic_deleted;
    if (!theorem1_holds(d, 0, 1, config(Criterion::kBdeu)).keep) ++bdeu_deleted;
  }
  EXPECT_GE(aic_deleted, 150u);  // expected 168.6, sd 5.1
  EXPECT_GE(bdeu_deleted, 190u);
}

TEST(ColliderStatistic, SymmetricInEnds) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Dataset d = random_data(5 + seed * 9, {2, 3, 2}, seed);
    for (const Criterion c : {Criterion::kAic, Criterion::kBdeu}) {
      const auto cfg = config(c);
      const double a = collider_statistic(d, 0, 1, 2, cfg);
      const double b = collider_statistic(d, 2, 1, 0, cfg);
      EXPECT_LE(std::abs(a - b), 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
}

TEST(ColliderStatistic, XorColliderPositiveChainNegative) {
  const Network collider = test::xor_network(test::make_dag(3, {{0, 1}, {2, 1}}), 0.05);
  const Network chain = test::xor_network(test::make_dag(3, {{0, 1}, {1, 2}}), 0.1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    EXPECT_GT(collider_statistic(forward_sample(collider, 5000, s), 0, 1, 2, config(Criterion::kBdeu)), 0.0);
    EXPECT_LT(collider_statistic(forward_sample(chain, 5000, s), 0, 1, 2, config(Criterion::kBdeu)), 0.0);
  }
}

TEST(GraphScore, DecomposableAndEquivalent) {
  const Dataset d = random_data(120, {2, 3, 2}, 21);
  for (const Criterion c : {Criterion::kAic, Criterion::kBdeu}) {
    const auto cfg = config(c);
    const Dag empty(3);
    EXPECT_NEAR(graph_score(d, empty, cfg),
                local_score(d, 0, {}, cfg) + local_score(d, 1, {}, cfg) + local_score(d, 2, {}, cfg), 1e-9);
    const Dag xy = test::make_dag(3, {{0, 1}});
    const VarIndex x[] = {0};
    EXPECT_NEAR(graph_score(d, xy, cfg) - graph_score(d, empty, cfg),
                local_score(d, 1, x, cfg) - local_score(d, 1, {}, cfg), 1e-9);
    const Dag yx = test::make_dag(3, {{1, 0}});
    EXPECT_NEAR(graph_score(d, xy, cfg), graph_score(d, yx, cfg), 1e-9 * std::abs(graph_score(d, xy, cfg)));
  }
}

}  // namespace
}  // namespace hlcd
