#include <gtest/gtest.h>

#include <algorithm>

#include "hlcd/network.hpp"
#include "hlcd/oracle_suite.hpp"
#include "hlcd/pc_discovery.hpp"
#include "hlcd/rng.hpp"
#include "support.hpp"

namespace hlcd {
namespace {

PcOptions with(PcAlgorithm algorithm) {
  PcOptions o;
  o.algorithm = algorithm;
  return o;
}

// Nodes 0 = A, 1 = T, 2 = B, 3 = isolated.
const Dag kChain = test::make_dag(4, {{0, 1}, {1, 2}});
const Dag kCollider = test::make_dag(4, {{0, 1}, {2, 1}});

class PcContracts : public ::testing::TestWithParam<PcAlgorithm> {};

VarSet run(CiTester& tester, VarIndex target, PcAlgorithm algorithm) {
  return algorithm == PcAlgorithm::kPcSimple ? pc_simple(tester, target, with(algorithm))
                                             : hiton_pc(tester, target, with(algorithm));
}

TEST_P(PcContracts, OracleChain) {
  DSeparationTester tester(kChain);
  EXPECT_EQ(run(tester, 1, GetParam()), (VarSet{0, 2}));
  EXPECT_EQ(run(tester, 0, GetParam()), (VarSet{1}));
  EXPECT_TRUE(run(tester, 3, GetParam()).empty());
}

TEST_P(PcContracts, SampledChainAndCollider) {
  const Dataset chain = forward_sample(test::xor_network(kChain, 0.1), 20000, 1);
  G2Tester chain_tester(chain, 0.01);
  EXPECT_EQ(discover_pc(chain, chain_tester, 1, with(GetParam())), (VarSet{0, 2}));
  EXPECT_EQ(discover_pc(chain, chain_tester, 0, with(GetParam())), (VarSet{1}));
  EXPECT_TRUE(discover_pc(chain, chain_tester, 3, with(GetParam())).empty());

  const Dataset collider = forward_sample(test::or_network(kCollider, 0.1), 20000, 2);
  G2Tester tester(collider, 0.01);
  EXPECT_EQ(discover_pc(collider, tester, 0, with(GetParam())), (VarSet{1}));
  EXPECT_EQ(discover_pc(collider, tester, 1, with(GetParam())), (VarSet{0, 2}));
}

INSTANTIATE_TEST_SUITE_P(CiBased, PcContracts, ::testing::Values(PcAlgorithm::kPcSimple, PcAlgorithm::kHitonPc),
                         [](const auto& info) {
                           return std::string(info.param == PcAlgorithm::kPcSimple ? "PcSimple" : "Hiton");
                         });

TEST(PcSimple, MaxCondSizeStopsEarly) {
  // A -> T -> B -> C: C is separated from T only by {B}.
  const Dag dag = test::make_dag(4, {{0, 1}, {1, 2}, {2, 3}});
  DSeparationTester tester(dag);
  PcOptions capped;
  capped.max_cond_size = 0;
  EXPECT_EQ(pc_simple(tester, 1, capped), (VarSet{0, 2, 3}));
  EXPECT_EQ(pc_simple(tester, 1, PcOptions{}), (VarSet{0, 2}));
}

TEST(HitonPc, SubsetOfMarginalSurvivors) {
  const Network net = load_network_file(HLCD_DATA_DIR "/networks/alarm.bif");
  const Dataset d = forward_sample(net, 500, 4);
  G2Tester tester(d, 0.01);
  PcOptions level0;
  level0.max_cond_size = 0;
  for (VarIndex t = 0; t < d.num_variables(); t += 3) {
    const VarSet survivors = pc_simple(tester, t, level0);
    const VarSet h = hiton_pc(tester, t, PcOptions{});
    EXPECT_TRUE(std::ranges::includes(survivors, h)) << "target " << t;
  }
}

TEST(Fcbf, CopyAndNoise) {
  Xoshiro256 rng(3);
  std::vector<std::vector<std::int32_t>> rows;
  for (int i = 0; i < 2000; ++i) {
    const auto x = static_cast<std::int32_t>(rng() % 2);
    rows.push_back({x, static_cast<std::int32_t>(rng() % 2), x});  // X, Y, T
  }
  const Dataset d = test::from_rows(rows);
  EXPECT_EQ(fcbf_pc(d, 2, with(PcAlgorithm::kFcbf)), (VarSet{0}));
}

TEST(Fcbf, TriplicateKeepsFirst) {
  const Dataset d = test::from_rows(test::repeat({{0, 0, 0}, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}}, 10));
  EXPECT_EQ(fcbf_pc(d, 2, with(PcAlgorithm::kFcbf)), (VarSet{0}));
}

TEST(Fcbf, IndependentColumns) {
  const Dataset d = test::from_rows(test::repeat(
      {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}, 5));
  EXPECT_TRUE(fcbf_pc(d, 0, with(PcAlgorithm::kFcbf)).empty());
}

TEST(Fcbf, MutualInformationRelevance) {
  const Dataset d = test::from_rows(test::repeat({{0, 0}, {1, 1}}, 10));
  PcOptions o = with(PcAlgorithm::kFcbf);
  o.relevance = RelevanceMeasure::kMutualInformation;
  o.mi_threshold = 0.7;  // above ln 2
  EXPECT_TRUE(fcbf_pc(d, 1, o).empty());
  o.mi_threshold = 0.6;
  EXPECT_EQ(fcbf_pc(d, 1, o), (VarSet{0}));
}

TEST(PcOptions, Validation) {
  PcOptions o;
  o.alpha = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o.alpha = 0.05;
  o.mi_threshold = -1.0;
  EXPECT_THROW(o.validate(), Error);
  EXPECT_EQ(parse_pc_algorithm("hiton"), PcAlgorithm::kHitonPc);
  EXPECT_EQ(to_string(PcAlgorithm::kFcbf), "fcbf");
  EXPECT_THROW(parse_pc_algorithm("mmpc"), Error);
  DSeparationTester tester(kChain);
  EXPECT_THROW(pc_simple(tester, 9, PcOptions{}), Error);
}

TEST(OrMerge, Semantics) {
  const Pdag one_sided = or_merge({{0, {1}}, {1, {}}}, 3);
  EXPECT_TRUE(one_sided.undirected(0, 1));
  EXPECT_EQ(one_sided.num_edges(), 1u);

  const Pdag symmetric = or_merge({{0, {1}}, {1, {0, 2}}, {2, {1}}}, 3);
  EXPECT_TRUE(symmetric.undirected(0, 1));
  EXPECT_TRUE(symmetric.undirected(1, 2));
  EXPECT_EQ(symmetric.num_edges(), 2u);

  EXPECT_EQ(or_merge({{0, {}}, {1, {}}}, 2).num_edges(), 0u);
  EXPECT_THROW(or_merge({{0, {0}}}, 2), Error);
  EXPECT_THROW(or_merge({{5, {}}}, 2), Error);
}

}  // namespace
}  // namespace hlcd
