#include <gtest/gtest.h>

#include "insider/consistency.hpp"
#include "insider/io.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace insider {
namespace {

using testing::ExpectedFinding;
using testing::Q;

std::vector<Finding> Check(const SystemModel& sm, const SafetyAnalysisModel& sam) {
  return CheckConsistency(sm, sam, Bind(sm, sam));
}

TEST(Consistency, ExamplePairIsConsistent) {
  EXPECT_TRUE(Check(testing::SmEx(), testing::SamEx()).empty());
}

class MutationTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MutationTest, ExactFindings) {
  testing::Mutation m = testing::Mutations()[GetParam()];
  auto observed = testing::Observed(Check(m.sm, m.sam));
  std::sort(observed.begin(), observed.end());
  std::sort(m.expected.begin(), m.expected.end());
  EXPECT_EQ(observed, m.expected) << m.name;
}

INSTANTIATE_TEST_SUITE_P(SingleElement, MutationTest, ::testing::Range<std::size_t>(0, 6));

TEST(Consistency, SpuriousConnectionOnDrivenInportIsABuildError) {
  auto connections = testing::SamExConnections();
  connections.push_back({"spur", Q("c2.h"), Q("c3.g")});
  try {
    BuildSafetyModel({testing::SamC1(), testing::SamC2(), testing::SamC3()}, connections);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.has(ErrorCode::kMultipleDrivers));
  }
}

TEST(Consistency, FeedbackLinkIsOrphanAndCyclic) {
  auto connections = testing::SamExConnections();
  connections.push_back({"loop", Q("c3.j"), Q("c1.a")});
  auto sam = BuildSafetyModel({testing::SamC1(), testing::SamC2(), testing::SamC3()}, connections);
  auto observed = testing::Observed(Check(testing::SmEx(), sam));
  ASSERT_EQ(observed.size(), 2u);
  EXPECT_EQ(observed[0], (ExpectedFinding{FindingKind::kOrphanFailureConnection, "loop",
                                          {"c3.j", "c1.a"}}));
  EXPECT_EQ(observed[1].kind, FindingKind::kCyclicPropagation);
  auto structural_only = CheckConsistency(testing::SmEx(), sam, Bind(testing::SmEx(), sam),
                                          {.advisories = false});
  EXPECT_EQ(structural_only.size(), 1u);
}

TEST(Consistency, OrphansAndMisdirectedPorts) {
  SamComponent extra;
  extra.name = "c9";
  extra.failure_ports = {testing::FIn("q", "c9.in")};
  SamComponent c2 = testing::SamC2();
  c2.failure_ports.push_back(testing::FOut("k", "c2.in2", "value"));
  c2.failure_ports.push_back(testing::FIn("m", "c1.in1"));
  c2.definitions["k"] = Expr::Event("y");
  auto sam = BuildSafetyModel({testing::SamC1(), c2, testing::SamC3(), extra},
                              testing::SamExConnections());
  auto observed = testing::Observed(Check(testing::SmEx(), sam));
  std::vector<ExpectedFinding> expected{
      {FindingKind::kOrphanSamComponent, "c9", {}},
      {FindingKind::kOrphanFailurePort, "c2.k", {"c2.in2"}},
      {FindingKind::kOrphanFailurePort, "c2.m", {"c1.in1"}}};
  EXPECT_EQ(observed, expected);
}

TEST(Consistency, EmptySafetyModel) {
  auto findings = Check(testing::SmEx(), BuildSafetyModel({}, {}));
  std::map<FindingKind, int> counts;
  for (const Finding& f : findings) ++counts[f.kind];
  EXPECT_EQ(counts[FindingKind::kMissingSamComponent], 3);
  EXPECT_EQ(counts[FindingKind::kMissingFailurePort], 7);
  EXPECT_EQ(counts[FindingKind::kMissingFailureConnection], 2);
  EXPECT_EQ(findings.size(), 12u);
}

TEST(ConsistencyProperty, ReportIsDeterministicAndOrdered) {
  testing::Rng rng(5);
  for (int round = 0; round < 200; ++round) {
    SystemModel sm = testing::RandomSystemModel(rng);
    SafetyAnalysisModel sam = testing::RandomSafetyModel(rng, sm);
    auto first = Check(sm, sam);
    auto second = Check(sm, sam);
    ASSERT_EQ(CanonicalText(FindingsToJson(first)), CanonicalText(FindingsToJson(second)));
    for (std::size_t i = 1; i < first.size(); ++i)
      ASSERT_FALSE(first[i] < first[i - 1]);
    for (std::size_t i = 1; i < first.size(); ++i)
      ASSERT_LE(std::make_pair(first[i - 1].kind, first[i - 1].subject),
                std::make_pair(first[i].kind, first[i].subject));
  }
}

}  // namespace
}  // namespace insider
