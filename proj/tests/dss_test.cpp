// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "mrlrc/dss.hpp"
#include "support.hpp"

using namespace mrlrc;

namespace {

// Failure pattern of the running example: four nodes of group 1, two each
// in groups 2 and 3.
const std::vector<NodeId> kExampleFailures{{1, 0}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}, {3, 0}, {3, 4}};

DssState random_state(const std::shared_ptr<const MrLrcParams>& p, std::mt19937_64& rng) {
  return DssState(p, test::random_vector(p->field(), p->k(), rng));
}

TEST(FailNodes, ZeroFailuresIsNoOp) {
  const auto p = test::example_system();
  std::mt19937_64 rng(1);
  auto s = random_state(p, rng);
  fail_nodes(s, {});
  EXPECT_TRUE(s.failed_nodes().empty());
  for (std::uint32_t i = 1; i <= p->g(); ++i) EXPECT_EQ(local_repair(s, i), LocalOutcome::NoOp);
  repair_all(s, Scheme::Direct);
  EXPECT_TRUE(s.transcript().empty());
}

TEST(FailNodes, ExamplePatternFlagsOnlyGroupOne) {
  const auto p = test::example_system();
  std::mt19937_64 rng(2);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  EXPECT_TRUE(s.needs_global(1));
  EXPECT_FALSE(s.needs_global(2));
  EXPECT_FALSE(s.needs_global(3));
  EXPECT_THROW(s.read({1, 0}), std::logic_error);
  EXPECT_EQ(global_failure_load(s), 2u);
}

TEST(LocalRepair, RestoresUpToDeltaMinusOne) {
  const auto p = test::example_system();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    auto s = random_state(p, rng);
    const std::uint32_t group = 1 + rng() % p->g();
    std::vector<std::uint32_t> idx{0, 1, 2, 3, 4};
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::uint32_t c = 0; c < p->delta - 1; ++c) s.mark_failed({group, idx[c]});
    ASSERT_EQ(local_repair(s, group), LocalOutcome::Repaired);
    for (std::uint32_t j = 0; j < p->group_size(); ++j) ASSERT_EQ(s.read({group, j}), s.truth().at(NodeId{group, j}));
  }
  auto s = random_state(p, rng);
  for (std::uint32_t j = 0; j < p->delta; ++j) s.mark_failed({2, j});
  EXPECT_EQ(local_repair(s, 2), LocalOutcome::NeedsGlobal);
}

TEST(RepairSet, DefaultIsLexicographic) {
  const auto p = test::example_system();
  std::mt19937_64 rng(4);
  auto s = random_state(p, rng);
  const auto rs = choose_repair_set(s);
  const std::vector<NodeId> expect{{1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}, {3, 0}};
  EXPECT_EQ(rs.positions, expect);
}

TEST(RepairSet, ExamplePatternBeforeLocalRepair) {
  const auto p = test::example_system();
  std::mt19937_64 rng(5);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  const std::vector<NodeId> expect{{1, 1}, {2, 0}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3}};
  EXPECT_EQ(choose_repair_set(s).positions, expect);
  EXPECT_EQ(choose_repair_set(s).groups(), (std::vector<std::uint32_t>{1, 2, 3}));
}

TEST(RepairSet, NineNodeSystem) {
  const auto p = test::nine_node_system();
  std::mt19937_64 rng(6);
  auto s = random_state(p, rng);
  const std::vector<NodeId> failed{{1, 0}, {1, 2}};
  fail_nodes(s, failed);
  const std::vector<NodeId> expect{{1, 1}, {2, 0}, {2, 1}, {3, 0}, {3, 1}};
  EXPECT_EQ(choose_repair_set(s).positions, expect);
}

TEST(RepairSet, PreferredPositionsFirst) {
  const auto p = test::example_system();
  std::mt19937_64 rng(7);
  auto s = random_state(p, rng);
  const auto rs = choose_repair_set(s, {{3, 4}, {3, 3}, {2, 4}});
  EXPECT_TRUE(rs.contains({3, 4}));
  EXPECT_TRUE(rs.contains({3, 3}));
  EXPECT_TRUE(rs.contains({2, 4}));
  EXPECT_EQ(rs.positions.size(), p->k());
}

TEST(RepairSet, TooManyFailuresIsUnrecoverable) {
  const auto p = test::example_system();
  std::mt19937_64 rng(8);
  auto s = random_state(p, rng);
  for (std::uint32_t j = 0; j < 5; ++j) s.mark_failed({1, j});
  for (std::uint32_t j = 0; j < 4; ++j) s.mark_failed({2, j});
  EXPECT_THROW(choose_repair_set(s), Unrecoverable);
  EXPECT_THROW(repair_all(s, Scheme::Direct), Unrecoverable);
}

TEST(LocalPolynomial, SumsToEncodingPolynomial) {
  const auto p = test::example_system();
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    auto s = random_state(p, rng);
    const auto rs = choose_repair_set(s, {p->node_at(rng() % p->N), p->node_at(rng() % p->N)});
    SkewPoly sum(p->lrs.field);
    for (auto i : rs.groups()) {
      const auto L = local_polynomial(s, i, rs);
      ASSERT_TRUE(!L.degree() || *L.degree() < p->k());
      sum = sum + L;
    }
    ASSERT_EQ(sum, s.f());
  }
}

TEST(LocalPolynomial, ZeroCodewordAndMissingGroup) {
  const auto p = test::example_system();
  DssState s(p, std::vector<Gf>(p->k()));
  const auto rs = choose_repair_set(s);
  for (auto i : rs.groups()) EXPECT_TRUE(local_polynomial(s, i, rs).is_zero());
  const auto p6 = test::make_code(7, 3, 3, 3, 2, 6);
  DssState s6(p6, std::vector<Gf>(p6->k(), Gf{1}));
  RepairSet two_groups{{{1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}}};
  EXPECT_FALSE(local_polynomial(s6, 1, two_groups).is_zero());
  EXPECT_THROW(local_polynomial(s6, 3, two_groups), std::invalid_argument);
}

TEST(DirectRepair, ExampleScenarioMessageCounts) {
  const auto p = test::example_system();
  std::mt19937_64 rng(10);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  const auto rs = choose_repair_set(s);
  repair_all(s, Scheme::Direct, {{1, {rs, std::nullopt}}});
  ASSERT_EQ(s.rounds().size(), 1u);
  const auto& round = s.rounds()[0];
  EXPECT_EQ(round.repaired, (std::vector<NodeId>{{1, 0}, {1, 2}}));
  // Two global positions, two inbound messages each.
  ASSERT_EQ(s.transcript().size(), 4u);
  for (const auto& m : s.transcript()) {
    EXPECT_EQ(m.to_cpu, 1u);
    EXPECT_NE(m.from_cpu, 1u);
  }
  EXPECT_TRUE(s.failed_nodes().empty());
  for (std::uint32_t mu = 0; mu < p->N; ++mu) EXPECT_EQ(s.read(p->node_at(mu)), s.truth().at(mu));
}

TEST(DirectRepair, TargetOutsideRepairSetGetsAllContributions) {
  // k = (g-1)r, so the other two groups alone can serve the repair.
  const auto p = test::make_code(7, 3, 3, 3, 2, 6);
  std::mt19937_64 rng(11);
  auto s = random_state(p, rng);
  const std::vector<NodeId> failed{{1, 0}, {1, 1}, {1, 2}, {1, 3}};
  fail_nodes(s, failed);
  repair_all(s, Scheme::Direct);
  EXPECT_EQ(s.rounds().at(0).delta.groups(), (std::vector<std::uint32_t>{2, 3}));
  EXPECT_EQ(s.transcript().size(), 2u * p->h);
  for (std::uint32_t mu = 0; mu < p->N; ++mu) EXPECT_EQ(s.read(p->node_at(mu)), s.truth().at(mu));
}

TEST(DirectRepair, ExplicitRepairSetValidated) {
  const auto p = test::example_system();
  std::mt19937_64 rng(19);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  RepairSet four_in_group{{{1, 1}, {2, 0}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3}}};
  four_in_group.positions[0] = {3, 1};
  EXPECT_THROW(direct_repair(s, 1, {four_in_group, std::nullopt}), ConfigError);
  RepairSet uses_failed{{{1, 0}, {2, 0}, {2, 3}, {2, 4}, {3, 1}, {3, 2}, {3, 3}}};
  EXPECT_THROW(direct_repair(s, 1, {uses_failed, std::nullopt}), ConfigError);
  RepairSet short_set{{{2, 0}, {2, 3}}};
  EXPECT_THROW(direct_repair(s, 1, {short_set, std::nullopt}), ConfigError);
}

TEST(DirectRepair, ZeroCodewordPayloadsAreZero) {
  const auto p = test::example_system();
  DssState s(p, std::vector<Gf>(p->k()));
  fail_nodes(s, kExampleFailures);
  repair_all(s, Scheme::Direct);
  EXPECT_FALSE(s.transcript().empty());
  for (const auto& m : s.transcript()) EXPECT_TRUE(m.payload.is_zero());
}

TEST(DirectRepair, HFailuresBeyondLocalInOneGroup) {
  const auto p = test::example_system();
  std::mt19937_64 rng(12);
  for (std::uint32_t target = 1; target <= p->g(); ++target) {
    auto s = random_state(p, rng);
    for (std::uint32_t j = 0; j < p->h + p->delta - 1; ++j) s.mark_failed({target, j});
    repair_all(s, Scheme::Direct);
    const auto& round = s.rounds().at(0);
    EXPECT_EQ(round.repaired.size(), p->h);
    const auto contributing = round.delta.groups();
    const bool target_contributes = std::count(contributing.begin(), contributing.end(), target) > 0;
    EXPECT_EQ(s.transcript().size(), p->h * (contributing.size() - (target_contributes ? 1 : 0)));
    for (std::uint32_t mu = 0; mu < p->N; ++mu) EXPECT_EQ(s.read(p->node_at(mu)), s.truth().at(mu));
  }
}

TEST(ForwardedRepair, ChainAlongList) {
  const auto p = test::example_system();
  const ExtField& F = p->field();
  std::mt19937_64 rng(13);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  const auto rs = choose_repair_set(s);
  repair_all(s, Scheme::Forwarded, {{1, {rs, ForwardingList{{2, 3, 1}}}}});
  const auto& round = s.rounds().at(0);
  ASSERT_EQ(s.transcript().size(), 4u);
  for (std::size_t t = 0; t < s.transcript().size(); t += 2) {
    const auto& a = s.transcript()[t];
    const auto& b = s.transcript()[t + 1];
    EXPECT_EQ(a.from_cpu, 2u);
    EXPECT_EQ(a.to_cpu, 3u);
    EXPECT_EQ(b.from_cpu, 3u);
    EXPECT_EQ(b.to_cpu, 1u);
    EXPECT_EQ(a.failed_locator_index, b.failed_locator_index);
    // Aggregate at the target is f(b') minus the target's own contribution.
    const Gf loc = p->tilde_b[static_cast<std::size_t>(b.failed_locator_index)];
    EXPECT_EQ(b.payload, F.sub(skew_eval(s.f(), loc), skew_eval(round.local.at(1), loc)));
    EXPECT_EQ(a.payload, skew_eval(round.local.at(2), loc));
  }
}

TEST(ForwardedRepair, InvalidListsRejected) {
  const auto p = test::example_system();
  std::mt19937_64 rng(14);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  for (std::uint32_t i = 2; i <= 3; ++i) local_repair(s, i);
  EXPECT_THROW(forwarded_repair(s, 1, {std::nullopt, ForwardingList{{2, 1, 3}}}), ConfigError);
  EXPECT_THROW(forwarded_repair(s, 1, {std::nullopt, ForwardingList{{2, 2, 1}}}), ConfigError);
  EXPECT_THROW(forwarded_repair(s, 1, {std::nullopt, ForwardingList{{3, 1}}}), ConfigError);
  EXPECT_THROW(forwarded_repair(s, 1, {std::nullopt, ForwardingList{{}}}), ConfigError);
}

TEST(ForwardedRepair, SingleContributorMatchesDirect) {
  // With the target and one other group in the repair set, both schemes send
  // the same single symbol per failed position.
  const auto p = test::nine_node_system();
  std::mt19937_64 rng(15);
  const auto u = test::random_vector(p->field(), p->k(), rng);
  const std::vector<NodeId> failed{{3, 0}, {3, 1}};
  RepairSet rs{{{1, 0}, {1, 1}, {2, 0}, {2, 1}, {3, 2}}};
  DssState a(p, u), b(p, u);
  fail_nodes(a, failed);
  fail_nodes(b, failed);
  direct_repair(a, 3, {rs, std::nullopt});
  forwarded_repair(b, 3, {rs, ForwardingList{{1, 2, 3}}});
  EXPECT_EQ(a.transcript().size(), 2u);
  EXPECT_EQ(b.transcript().size(), 2u);
}

TEST(NaiveRepair, DownloadsKMinusNu) {
  const auto p = test::example_system();
  std::mt19937_64 rng(16);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  repair_all(s, Scheme::Naive);
  // ν = 1 intact node in group 1.
  EXPECT_EQ(s.transcript().size(), p->k() - 1);
  for (const auto& m : s.transcript()) {
    EXPECT_EQ(m.to_cpu, 1u);
    EXPECT_EQ(m.failed_locator_index, -1);
  }
}

TEST(RepairAll, SchemesAgreeWithGroundTruth) {
  const auto p = test::example_system();
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const auto u = test::random_vector(p->field(), p->k(), rng);
    // Random pattern within budget: up to δ-1 per group, plus h more spread out.
    std::vector<NodeId> failed;
    std::vector<std::uint32_t> extra(p->g(), 0);
    for (std::uint32_t e = 0; e < p->h; ++e) ++extra[rng() % p->g()];
    for (std::uint32_t i = 1; i <= p->g(); ++i) {
      std::vector<std::uint32_t> idx{0, 1, 2, 3, 4};
      std::shuffle(idx.begin(), idx.end(), rng);
      const std::uint32_t count = std::min<std::uint32_t>(5, rng() % p->delta + extra[i - 1]);
      for (std::uint32_t c = 0; c < count; ++c) failed.push_back({i, idx[c]});
    }
    std::vector<std::vector<Gf>> restored;
    for (auto scheme : {Scheme::Naive, Scheme::Direct, Scheme::Forwarded}) {
      DssState s(p, u);
      fail_nodes(s, failed);
      repair_all(s, scheme);
      std::vector<Gf> vals;
      for (std::uint32_t mu = 0; mu < p->N; ++mu) vals.push_back(s.read(p->node_at(mu)));
      ASSERT_EQ(vals, s.truth().flat());
      restored.push_back(vals);
    }
    ASSERT_EQ(restored[0], restored[1]);
    ASSERT_EQ(restored[1], restored[2]);
  }
}

TEST(Transcript, CsvFormat) {
  const auto p = test::example_system();
  std::mt19937_64 rng(18);
  auto s = random_state(p, rng);
  fail_nodes(s, kExampleFailures);
  repair_all(s, Scheme::Forwarded);
  std::ostringstream os;
  write_transcript_csv(os, p->field(), s.transcript());
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "round,scheme,from_cpu,to_cpu,failed_locator_index,payload");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1,forwarded,2,3,0,(", 0), 0u) << line;
}

}  // namespace
