// Copyright 2026 The hdrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdr/mcts.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace hdr
{
namespace
{

SimConfig quiet()
{
  SimConfig c;
  c.spawn.arrival_rate_per_lane = 0.0;
  return c;
}

WorldState lone_cav(int lane, Intention intention, double x = 50.0, double v = 15.0)
{
  WorldState w;
  w.rng = Rng(1);
  insert_vehicle(w, VehicleKind::Cav, x, lane, v, intention).t_since_lc_s = 10.0;
  return w;
}

TEST(Plan, AcceleratesOnAnEmptyRoad)
{
  const auto w = lone_cav(1, Intention::Straight);
  SearchConfig cfg;
  cfg.budget = 200;
  const auto a = plan(w, cfg, quiet(), RewardParams{}, RewardStream{});
  ASSERT_EQ(a.size(), 1U);
  EXPECT_EQ(a.at(1).longitudinal, Longitudinal::Accelerate);
}

TEST(Plan, OneStepSearchMatchesExhaustiveLookahead)
{
  const RewardParams params;
  for (auto [lane, intention] : {std::pair{1, Intention::Right}, std::pair{2, Intention::Straight}, std::pair{2, Intention::Left}}) {
    const auto w = lone_cav(lane, intention, 120.0, 20.0);
    std::array<double, DiscreteAction::kCount> oracle{};
    for (const auto a : all_actions()) {
      const JointAction ja{{1, a}};
      const auto out = step(w, ja, quiet());
      oracle[static_cast<std::size_t>(a.index())] = evaluate_reward(w, out, ja, params, RewardVariant::HDR).total;
    }
    const int best = static_cast<int>(std::max_element(oracle.begin(), oracle.end()) - oracle.begin());
    SearchConfig cfg;
    cfg.budget = 10000;
    cfg.rollout_horizon = 1;
    const auto a = plan(w, cfg, quiet(), params, RewardStream{});
    EXPECT_EQ(a.at(1).index(), best) << static_cast<int>(intention);
  }
}

TEST(Plan, SteersTowardTheTargetLane)
{
  // Far upstream the lateral potential gain is too small to repay the
  // lane-change frequency penalty within the rollout horizon.
  const auto w = lone_cav(1, Intention::Right, 150.0);
  const RewardParams params;
  double best_trd = -1.0;
  Lateral best_lat = Lateral::Keep;
  for (const auto a : all_actions()) {
    const JointAction ja{{1, a}};
    const auto rb = evaluate_reward(w, step(w, ja, quiet()), ja, params, RewardVariant::HDR);
    if (rb.cavs[0].r_trd > best_trd + 1e-12) {
      best_trd = rb.cavs[0].r_trd;
      best_lat = a.lateral;
    }
  }
  ASSERT_EQ(best_lat, Lateral::ChangeRight);
  for (const auto scaling : {UctScaling::Range, UctScaling::Raw}) {
    SearchConfig cfg;
    cfg.budget = 500;
    cfg.uct_scaling = scaling;
    const auto a = plan(w, cfg, quiet(), params, RewardStream{});
    EXPECT_EQ(a.at(1).lateral, Lateral::ChangeRight) << to_string(scaling);
  }
}

TEST(Plan, BudgetOneReturnsTheExpandedAction)
{
  WorldState w = lone_cav(1, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 80, 2, 12, Intention::Left);
  SearchConfig cfg;
  cfg.budget = 1;
  const auto r1 = plan_with_tree(w, cfg, quiet(), RewardParams{}, RewardStream{});
  const auto r2 = plan_with_tree(w, cfg, quiet(), RewardParams{}, RewardStream{});
  EXPECT_EQ(r1.action, r2.action);
  EXPECT_EQ(r1.tree.simulations, 1);
  ASSERT_EQ(r1.action.size(), 2U);
  for (const auto & [id, a] : r1.action) EXPECT_EQ(a, DiscreteAction::keep()) << id;
  EXPECT_EQ(r1.tree.nodes[0].action_visits[0], 1);
}

TEST(Plan, DeterministicGivenSeedBase)
{
  WorldState w = lone_cav(1, Intention::Straight);
  insert_vehicle(w, VehicleKind::Hdv, 90, 1, 10, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 60, 3, 12, Intention::Left);
  SearchConfig cfg;
  cfg.budget = 150;
  cfg.determinization_seed_base = 77;
  const auto a = plan_with_tree(w, cfg, SimConfig{}, RewardParams{}, RewardStream{});
  const auto b = plan_with_tree(w, cfg, SimConfig{}, RewardParams{}, RewardStream{});
  EXPECT_EQ(a.action, b.action);
  ASSERT_EQ(a.tree.nodes.size(), b.tree.nodes.size());
  for (std::size_t i = 0; i < a.tree.nodes.size(); ++i) {
    EXPECT_EQ(a.tree.nodes[i].value_sums, b.tree.nodes[i].value_sums);
    EXPECT_EQ(a.tree.nodes[i].state_digest, b.tree.nodes[i].state_digest);
  }
}

TEST(Plan, TreeCountsAreConsistent)
{
  WorldState w = lone_cav(1, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 70, 2, 12, Intention::Right);
  insert_vehicle(w, VehicleKind::Hdv, 100, 1, 10, Intention::Straight);
  SearchConfig cfg;
  cfg.budget = 300;
  const auto r = plan_with_tree(w, cfg, SimConfig{}, RewardParams{}, RewardStream{});
  const auto & nodes = r.tree.nodes;
  EXPECT_EQ(r.tree.simulations, 300);
  EXPECT_EQ(nodes[0].visits, 301);
  EXPECT_EQ(nodes[0].agent, 1U);
  // One node per simulation plus the root.
  EXPECT_EQ(nodes.size(), 301U);
  for (const auto & n : nodes) {
    const int sum = std::accumulate(n.action_visits.begin(), n.action_visits.end(), 0);
    EXPECT_EQ(n.visits, 1 + sum);
    for (int a = 0; a < DiscreteAction::kCount; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      EXPECT_EQ(n.action_visits[ai] > 0, n.children[ai] >= 0);
      if (n.children[ai] >= 0) {
        EXPECT_EQ(nodes[static_cast<std::size_t>(n.children[ai])].visits, n.action_visits[ai]);
      }
    }
  }
  // The second CAV decides below the root, within the same step.
  const auto & c0 = nodes[static_cast<std::size_t>(nodes[0].children[0])];
  EXPECT_EQ(c0.agent, 2U);
  EXPECT_EQ(c0.step, 0);
  EXPECT_GT(r.tree.max_depth_steps, 0);
  EXPECT_LE(r.tree.max_depth_steps, 2 * cfg.rollout_horizon);
}

TEST(Plan, TimeLimitTruncatesLookahead)
{
  auto w = lone_cav(1, Intention::Straight);
  SearchConfig cfg;
  cfg.budget = 20;
  cfg.time_limit_s = 0.3;
  const auto r = plan_with_tree(w, cfg, quiet(), RewardParams{}, RewardStream{});
  EXPECT_LE(r.tree.max_depth_steps, 3);
}

TEST(Plan, ContractViolations)
{
  WorldState empty;
  SearchConfig cfg;
  EXPECT_THROW(plan(empty, cfg, quiet(), RewardParams{}, RewardStream{}), ContractViolation);
  WorldState crowd;
  for (int i = 0; i < 5; ++i) insert_vehicle(crowd, VehicleKind::Cav, 20.0 * i, i % 4, 10, Intention::Straight);
  EXPECT_THROW(plan(crowd, cfg, quiet(), RewardParams{}, RewardStream{}), ContractViolation);
  cfg.budget = 0;
  EXPECT_THROW(plan(lone_cav(1, Intention::Straight), cfg, quiet(), RewardParams{}, RewardStream{}), ContractViolation);
  cfg = SearchConfig{};
  cfg.discount = 0.0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = SearchConfig{};
  cfg.rollout_horizon = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Plan, DoesNotMutateTheInputWorld)
{
  WorldState w = lone_cav(1, Intention::Straight);
  insert_vehicle(w, VehicleKind::Hdv, 90, 2, 10, Intention::Straight);
  const auto before = w;
  SearchConfig cfg;
  cfg.budget = 50;
  plan(w, cfg, SimConfig{}, RewardParams{}, RewardStream{RewardVariant::CTH, 1.5, 0.01});
  EXPECT_EQ(w, before);
}

TEST(Plan, CoversEveryCav)
{
  WorldState w;
  w.rng = Rng(2);
  for (int i = 0; i < 4; ++i) insert_vehicle(w, VehicleKind::Cav, 25.0 * i, i, 10, Intention::Straight);
  SearchConfig cfg;
  cfg.budget = 100;
  const auto a = plan(w, cfg, SimConfig{}, RewardParams{}, RewardStream{});
  EXPECT_EQ(a.size(), 4U);
  for (auto id : w.cav_ids()) EXPECT_TRUE(a.contains(id));
}

TEST(RolloutPolicy, Names)
{
  EXPECT_EQ(parse_rollout_policy("uniform"), RolloutPolicy::UniformRandom);
  EXPECT_EQ(parse_rollout_policy(to_string(RolloutPolicy::GreedyArg)), RolloutPolicy::GreedyArg);
  EXPECT_FALSE(parse_rollout_policy("greedy").has_value());
  EXPECT_EQ(parse_uct_scaling("raw"), UctScaling::Raw);
  EXPECT_EQ(parse_uct_scaling(to_string(UctScaling::Range)), UctScaling::Range);
  EXPECT_FALSE(parse_uct_scaling("normalized").has_value());
}

TEST(WorldDigest, SensitiveToState)
{
  auto a = lone_cav(1, Intention::Straight);
  auto b = a;
  EXPECT_EQ(world_digest(a), world_digest(b));
  b.vehicles[0].x_m += 1e-9;
  EXPECT_NE(world_digest(a), world_digest(b));
  b = a;
  b.t_s = 0.1;
  EXPECT_NE(world_digest(a), world_digest(b));
}

}  // namespace
}  // namespace hdr
