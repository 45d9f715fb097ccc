#include <gtest/gtest.h>

#include <algorithm>

#include "hlcd/graph_eval.hpp"
#include "hlcd/hlcd_engine.hpp"
#include "hlcd/oracle_suite.hpp"
#include "support.hpp"

namespace hlcd {
namespace {

TEST(OracleDiscover, Collider) {
  const auto r = oracle_discover(test::make_dag(3, {{0, 1}, {2, 1}}), 1);
  EXPECT_EQ(r.parents, (VarSet{0, 2}));
  EXPECT_TRUE(r.children.empty());
  EXPECT_TRUE(r.undirected.empty());
}

TEST(OracleDiscover, ChainStaysUndirected) {
  const auto r = oracle_discover(test::make_dag(3, {{0, 1}, {1, 2}}), 1);
  EXPECT_TRUE(r.parents.empty());
  EXPECT_TRUE(r.children.empty());
  EXPECT_EQ(r.undirected, (VarSet{0, 2}));
  EXPECT_EQ(r.visited.size(), 3u);
}

TEST(OracleDiscover, OrientationFromDistantCollider) {
  // 0 -> 2 <- 1, 2 -> 3 -> 4: the edge 3-4 is oriented through Meek R1 once
  // the search has reached the collider.
  const auto r = oracle_discover(test::make_dag(5, {{0, 2}, {1, 2}, {2, 3}, {3, 4}}), 4);
  EXPECT_EQ(r.parents, (VarSet{3}));
  EXPECT_TRUE(r.undirected.empty());
}

TEST(OracleDiscover, StopsOnceTargetIsOriented) {
  // Target 2 is a collider; nodes far away are never visited.
  const auto r = oracle_discover(test::make_dag(6, {{0, 2}, {1, 2}, {3, 4}, {4, 5}}), 2);
  EXPECT_EQ(r.parents, (VarSet{0, 1}));
  EXPECT_EQ(r.visited.front(), 2u);
  EXPECT_EQ(std::count(r.visited.begin(), r.visited.end(), 5u), 0);
}

TEST(OracleDiscover, IsolatedTarget) {
  const auto r = oracle_discover(test::make_dag(3, {{0, 1}}), 2);
  EXPECT_TRUE(r.parents.empty());
  EXPECT_TRUE(r.children.empty());
  EXPECT_TRUE(r.undirected.empty());
}

TEST(PruneTheorem1, Examples) {
  const Network net = test::xor_network(test::make_dag(3, {{0, 1}}), 0.1);
  const ScoreConfig cfg;
  EXPECT_TRUE(prune_theorem1(forward_sample(net, 100, 1), 1, {}, cfg).empty());
  std::size_t removed = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Dataset d = forward_sample(net, 1000, s);
    const VarSet out = prune_theorem1(d, 1, {0, 2}, cfg);
    EXPECT_TRUE(std::ranges::includes(VarSet{0, 2}, out));
    EXPECT_EQ(std::count(out.begin(), out.end(), 0u), 1);
    if (std::count(out.begin(), out.end(), 2u) == 0) ++removed;
  }
  EXPECT_GE(removed, 45u);
}

TEST(DetectVStructures, SingleNeighbour) {
  const Network net = test::xor_network(test::make_dag(2, {{0, 1}}), 0.1);
  const Dataset d = forward_sample(net, 500, 1);
  Pdag pdag(2);
  pdag.add_undirected(0, 1);
  EXPECT_TRUE(detect_v_structures(d, pdag, 1, HlcdOptions{}).empty());
  EXPECT_TRUE(pdag.undirected(0, 1));
}

TEST(DetectVStructures, XorColliderAndChain) {
  const Network collider = test::xor_network(test::make_dag(3, {{0, 1}, {2, 1}}), 0.05);
  const Network chain = test::xor_network(test::make_dag(3, {{0, 1}, {1, 2}}), 0.1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    Pdag pdag(3);
    pdag.add_undirected(0, 1);
    pdag.add_undirected(1, 2);
    const auto oriented = detect_v_structures(forward_sample(collider, 5000, s), pdag, 1, HlcdOptions{});
    EXPECT_EQ(oriented.size(), 2u);
    EXPECT_TRUE(pdag.directed(0, 1));
    EXPECT_TRUE(pdag.directed(2, 1));

    Pdag plain(3);
    plain.add_undirected(0, 1);
    plain.add_undirected(1, 2);
    EXPECT_TRUE(detect_v_structures(forward_sample(chain, 5000, s), plain, 1, HlcdOptions{}).empty());
    EXPECT_TRUE(plain.undirected(0, 1));
  }
}

TEST(DetectVStructures, ShieldedPairsSkipped) {
  const Network net = test::xor_network(test::make_dag(3, {{0, 1}, {2, 1}}), 0.05);
  Pdag pdag(3);
  pdag.add_undirected(0, 1);
  pdag.add_undirected(1, 2);
  pdag.add_undirected(0, 2);
  EXPECT_TRUE(detect_v_structures(forward_sample(net, 5000, 1), pdag, 1, HlcdOptions{}).empty());
}

TEST(ClassifyNeighbors, Marks) {
  Pdag pdag(4);
  pdag.set_directed(0, 1);
  pdag.set_directed(1, 2);
  pdag.add_undirected(1, 3);
  const auto c = classify_neighbors(pdag, 1);
  EXPECT_EQ(c.parents, (VarSet{0}));
  EXPECT_EQ(c.children, (VarSet{2}));
  EXPECT_EQ(c.undirected, (VarSet{3}));
  EXPECT_THROW(classify_neighbors(pdag, 4), Error);
}

TEST(Discover, SampledColliderWithChild) {
  // 0 -> 2 <- 1, 2 -> 3: every edge at 2 is compelled.
  const Network net = test::or_network(test::make_dag(4, {{0, 2}, {1, 2}, {2, 3}}), 0.05);
  const Dataset d = forward_sample(net, 5000, 3);
  const auto r = discover(d, 2, HlcdOptions{});
  EXPECT_EQ(r.parents, (VarSet{0, 1}));
  EXPECT_EQ(r.children, (VarSet{3}));
  EXPECT_EQ(r.diagnostics.identity_violations, 0u);
  EXPECT_GE(r.diagnostics.v_structures, 1u);
}

TEST(Discover, DeterministicAndCacheIndependent) {
  const Network net = load_network_file(HLCD_DATA_DIR "/networks/alarm.bif");
  const Dataset d = forward_sample(net, 500, 8);
  HlcdOptions options;
  auto scores = std::make_shared<ScoreCache>(d, options.score);
  auto pcs = std::make_shared<PcCache>();
  for (VarIndex t = 0; t < d.num_variables(); t += 4) {
    const auto fresh = discover(d, t, options);
    DataLearner shared(d, options, scores, pcs);
    const auto cached = discover(shared, t, options);
    EXPECT_EQ(fresh.parents, cached.parents);
    EXPECT_EQ(fresh.children, cached.children);
    EXPECT_EQ(fresh.undirected, cached.undirected);
    EXPECT_EQ(fresh.visited, cached.visited);
    EXPECT_EQ(fresh.diagnostics.identity_violations, 0u);
  }
}

TEST(Discover, AllPcAlgorithmsRun) {
  const Network net = load_network_file(HLCD_DATA_DIR "/networks/child.bif");
  const Dataset d = forward_sample(net, 500, 2);
  const auto names = d.names();
  for (const auto a : {PcAlgorithm::kPcSimple, PcAlgorithm::kHitonPc, PcAlgorithm::kFcbf}) {
    HlcdOptions options;
    options.pc.algorithm = a;
    for (VarIndex t = 0; t < d.num_variables(); ++t) {
      const auto r = discover(d, t, options);
      EXPECT_NO_THROW(local_metrics(r, names, net));
      EXPECT_EQ(r.visited.front(), t);
    }
  }
}

TEST(Discover, InvalidTarget) {
  const Network net = test::xor_network(test::make_dag(2, {{0, 1}}), 0.1);
  EXPECT_THROW(discover(forward_sample(net, 10, 1), 5, HlcdOptions{}), Error);
}

}  // namespace
}  // namespace hlcd
