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

#include "hdr/traffic_sim.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

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

JointAction keep_all(const WorldState & w)
{
  JointAction ja;
  for (auto id : w.cav_ids()) ja.emplace(id, DiscreteAction::keep());
  return ja;
}

VehicleState hdv_at(VehicleId id, double x, int lane, double v, Intention in = Intention::Straight)
{
  VehicleState s;
  s.id = id;
  s.kind = VehicleKind::Hdv;
  s.x_m = x;
  s.lane = lane;
  s.y_m = lane * 3.2;
  s.v_x = v;
  s.intention = in;
  s.target_lane = target_lane_for(in, lane, RoadGeometry::standard());
  s.t_since_lc_s = 10.0;
  return s;
}

TEST(Krauss, FreeFlowClampsAtVmax)
{
  HdvParams p;
  const auto self = hdv_at(1, 0, 1, 29.9);
  EXPECT_DOUBLE_EQ(hdv_follow_speed_with_draw(self, nullptr, p, 0.1, 0.0), 30.0);
}

TEST(Krauss, StoppedLeaderAtTinyGap)
{
  HdvParams p;
  const auto self = hdv_at(1, 100, 1, 10.0);
  const auto lead = hdv_at(2, 100 + 5.0 + 0.1, 1, 0.0);
  const double v_safe = krauss_safe_speed(10.0, 0.0, 0.1, p);
  EXPECT_NEAR(v_safe, 0.1 / (10.0 / 9.0 + 1.1), 1e-15);
  EXPECT_NEAR(v_safe, 0.045, 5e-4);
  for (double u : {0.0, 0.5, 1.0}) {
    EXPECT_LE(hdv_follow_speed_with_draw(self, &lead, p, 0.1, u), v_safe + 1e-15);
  }
}

TEST(Krauss, ZeroImperfectionReturnsDesiredSpeed)
{
  HdvParams p;
  p.eps_imperfection = 0.0;
  const auto self = hdv_at(1, 0, 1, 10.0);
  Rng rng(3);
  EXPECT_DOUBLE_EQ(hdv_follow_speed(self, nullptr, p, 0.1, rng), 10.25);
  EXPECT_DOUBLE_EQ(hdv_follow_speed_with_draw(self, nullptr, p, 0.1, 0.9), 10.25);
}

TEST(Krauss, ImperfectionSubtractsScaledDraw)
{
  HdvParams p;
  const auto self = hdv_at(1, 0, 1, 10.0);
  EXPECT_NEAR(hdv_follow_speed_with_draw(self, nullptr, p, 0.1, 1.0), 10.25 - 0.5 * 2.5 * 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(hdv_follow_speed_with_draw(hdv_at(1, 0, 1, 0.0), nullptr, p, 0.1, 1.0), 0.125);
}

TEST(LaneChangeDecision, StrategicPullTowardTarget)
{
  const auto g = RoadGeometry::standard();
  WorldState w;
  w.vehicles.push_back(hdv_at(1, 100, 2, 10, Intention::Right));
  const auto & self = w.vehicles[0];
  EXPECT_EQ(hdv_lane_change_decision(self, neighbors_of(w, self), g, HdvParams{}, 0.1), Lateral::ChangeRight);
}

TEST(LaneChangeDecision, NoIncentiveKeepsLane)
{
  const auto g = RoadGeometry::standard();
  WorldState w;
  w.vehicles.push_back(hdv_at(1, 100, 1, 10));
  w.vehicles.push_back(hdv_at(2, 140, 1, 10));
  w.vehicles.push_back(hdv_at(3, 140, 2, 10));
  w.vehicles.push_back(hdv_at(4, 140, 0, 10));
  const auto & self = w.vehicles[0];
  EXPECT_EQ(hdv_lane_change_decision(self, neighbors_of(w, self), g, HdvParams{}, 0.1), Lateral::Keep);
}

TEST(LaneChangeDecision, UnsafeFollowerBlocksStrategicMove)
{
  const auto g = RoadGeometry::standard();
  WorldState w;
  w.vehicles.push_back(hdv_at(1, 100, 2, 10, Intention::Left));
  w.vehicles.push_back(hdv_at(2, 100 - 5.0 - 2.0, 3, 15));
  const auto & self = w.vehicles[0];
  const auto nb = neighbors_of(w, self);
  ASSERT_NE(nb.left.follower, nullptr);
  EXPECT_EQ(nb.left.follower->id, 2U);
  EXPECT_EQ(hdv_lane_change_decision(self, nb, g, HdvParams{}, 0.1), Lateral::Keep);
}

TEST(LaneChangeDecision, TacticalOvertakeWhenClearlyFaster)
{
  const auto g = RoadGeometry::standard();
  WorldState w;
  w.vehicles.push_back(hdv_at(1, 100, 1, 10));
  w.vehicles.push_back(hdv_at(2, 106, 1, 2));
  const auto & self = w.vehicles[0];
  const auto d = hdv_lane_change_decision(self, neighbors_of(w, self), g, HdvParams{}, 0.1);
  EXPECT_NE(d, Lateral::Keep);
}

TEST(LaneChangeDecision, NeverLeavesPermittedLaneTactically)
{
  const auto g = RoadGeometry::standard();
  WorldState w;
  // A Right-intention HDV in lane 0 may not overtake into lane 1.
  w.vehicles.push_back(hdv_at(1, 100, 0, 10, Intention::Right));
  w.vehicles.push_back(hdv_at(2, 106, 0, 2));
  const auto & self = w.vehicles[0];
  EXPECT_EQ(hdv_lane_change_decision(self, neighbors_of(w, self), g, HdvParams{}, 0.1), Lateral::Keep);
}

TEST(Step, EmptyWorldStaysEmpty)
{
  WorldState w;
  const auto out = step(w, {}, quiet());
  EXPECT_TRUE(out.next_state.vehicles.empty());
  EXPECT_TRUE(out.collisions.empty());
  EXPECT_TRUE(out.despawned.empty());
  EXPECT_TRUE(out.spawned.empty());
  EXPECT_NEAR(out.next_state.t_s, 0.1, 1e-15);
}

TEST(Step, ExitInPermittedLaneSucceeds)
{
  WorldState w;
  auto & v = insert_vehicle(w, VehicleKind::Cav, 249.9, 0, 10.0, Intention::Right);
  const auto id = v.id;
  const auto out = step(w, keep_all(w), quiet());
  ASSERT_EQ(out.despawned.size(), 1U);
  EXPECT_EQ(out.despawned[0].id, id);
  EXPECT_TRUE(out.despawned[0].success);
  EXPECT_EQ(out.despawned[0].kind, VehicleKind::Cav);
  EXPECT_TRUE(out.next_state.vehicles.empty());
}

TEST(Step, ExitInWrongLaneFails)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 249.9, 1, 10.0, Intention::Right);
  const auto out = step(w, keep_all(w), quiet());
  ASSERT_EQ(out.despawned.size(), 1U);
  EXPECT_FALSE(out.despawned[0].success);
}

TEST(Step, OverlapIsACollision)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 100, 1, 10.0, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 103, 1, 10.0, Intention::Straight);
  const auto out = step(w, keep_all(w), quiet());
  ASSERT_EQ(out.collisions.size(), 1U);
  EXPECT_EQ(out.collisions[0], std::make_pair(VehicleId{1}, VehicleId{2}));
  EXPECT_TRUE(out.collided_this_step(1));
  EXPECT_TRUE(out.collided_this_step(2));
  EXPECT_TRUE(out.next_state.vehicles.empty());
  EXPECT_TRUE(out.despawned.empty());
}

TEST(Step, AdjacentLanesDoNotCollide)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 100, 1, 10.0, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 100, 2, 10.0, Intention::Straight);
  EXPECT_TRUE(step(w, keep_all(w), quiet()).collisions.empty());
}

TEST(Step, LaneChangeIntoNeighbourCollides)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 100, 1, 10.0, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 101, 2, 10.0, Intention::Straight);
  const auto cfg = quiet();
  bool hit = false;
  for (int k = 0; k < 10 && !hit; ++k) {
    JointAction ja{{1, {Lateral::ChangeLeft, Longitudinal::Maintain}}, {2, DiscreteAction::keep()}};
    auto out = step(w, ja, cfg);
    hit = !out.collisions.empty();
    w = std::move(out.next_state);
  }
  EXPECT_TRUE(hit);
}

TEST(Step, MismatchedActionKeysAreRejected)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 100, 1, 10.0, Intention::Straight);
  EXPECT_THROW(step(w, {}, quiet()), ContractViolation);
  JointAction extra{{1, DiscreteAction::keep()}, {7, DiscreteAction::keep()}};
  EXPECT_THROW(step(w, extra, quiet()), ContractViolation);
  JointAction wrong{{2, DiscreteAction::keep()}};
  EXPECT_THROW(step(w, wrong, quiet()), ContractViolation);
}

TEST(Step, SpawnsRespectTheCavCap)
{
  SimConfig cfg;
  cfg.spawn.arrival_rate_per_lane = 5.0;
  cfg.spawn.cav_fraction = 1.0;
  cfg.spawn.max_cavs = 2;
  WorldState w;
  w.rng = Rng(4);
  for (int k = 0; k < 300; ++k) {
    auto out = step(w, keep_all(w), cfg);
    w = std::move(out.next_state);
    ASSERT_LE(w.cav_count(), 2U);
  }
}

TEST(Step, SpawnGapIsRespected)
{
  SimConfig cfg;
  cfg.spawn.arrival_rate_per_lane = 20.0;
  WorldState w;
  w.rng = Rng(8);
  for (int k = 0; k < 500; ++k) {
    auto out = step(w, keep_all(w), cfg);
    for (auto id : out.spawned) {
      const auto * v = out.next_state.find(id);
      ASSERT_NE(v, nullptr);
      EXPECT_EQ(v->x_m, 0.0);
      for (const auto & o : out.next_state.vehicles) {
        if (o.id != id && o.occupies(v->lane)) EXPECT_GE(o.x_m, cfg.spawn.min_spawn_gap_m);
      }
      EXPECT_GE(v->v_x, cfg.spawn.v0_min);
      EXPECT_LE(v->v_x, cfg.spawn.v0_max);
    }
    w = std::move(out.next_state);
  }
}

WorldState hdv_world(std::uint64_t seed)
{
  WorldState w;
  w.rng = Rng(seed);
  return w;
}

TEST(StepProperty, HdvOnlyTrafficIsCollisionFreeWithoutImperfection)
{
  for (double rate : {0.1, 0.5, 2.0}) {
    SimConfig cfg;
    cfg.hdv.eps_imperfection = 0.0;
    cfg.spawn.cav_fraction = 0.0;
    cfg.spawn.arrival_rate_per_lane = rate;
    auto w = hdv_world(17);
    int collisions = 0;
    for (int k = 0; k < 10000; ++k) {
      auto out = step(w, {}, cfg);
      collisions += static_cast<int>(out.collisions.size());
      w = std::move(out.next_state);
    }
    EXPECT_EQ(collisions, 0) << "rate " << rate;
  }
}

TEST(StepProperty, AgentSetVaries)
{
  SimConfig cfg;
  WorldState w;
  w.rng = Rng(23);
  std::set<std::size_t> sizes;
  for (int k = 0; k < 3000; ++k) {
    JointAction ja = keep_all(w);
    auto out = step(w, ja, cfg);
    w = std::move(out.next_state);
    sizes.insert(w.cav_count());
  }
  EXPECT_GE(sizes.size(), 3U);
}

TEST(StepProperty, EveryVehicleLeavesExactlyOnce)
{
  SimConfig cfg;
  cfg.spawn.arrival_rate_per_lane = 0.4;
  WorldState w;
  w.rng = Rng(31);
  std::map<VehicleId, int> ends;
  std::set<VehicleId> born;
  Rng act(2);
  for (int k = 0; k < 6000 && (k < 1500 || !w.vehicles.empty()); ++k) {
    if (k == 1500) cfg.spawn.arrival_rate_per_lane = 0.0;
    JointAction ja;
    for (auto id : w.cav_ids()) ja.emplace(id, DiscreteAction::from_index(act.below(9)));
    auto out = step(w, ja, cfg);
    for (auto id : out.spawned) born.insert(id);
    for (const auto & d : out.despawned) ++ends[d.id];
    for (const auto & c : out.collided) ++ends[c.first];
    for (const auto & d : out.despawned) EXPECT_FALSE(out.collided_this_step(d.id));
    w = std::move(out.next_state);
  }
  EXPECT_TRUE(w.vehicles.empty());
  ASSERT_FALSE(born.empty());
  EXPECT_EQ(ends.size(), born.size());
  for (auto id : born) EXPECT_EQ(ends[id], 1) << id;
}

TEST(StepProperty, DeterministicGivenSeed)
{
  SimConfig cfg;
  cfg.spawn.arrival_rate_per_lane = 0.5;
  auto run = [&](std::uint64_t seed) {
    WorldState w;
    w.rng = Rng(seed);
    std::vector<WorldState> trace;
    Rng act(seed + 1);
    for (int k = 0; k < 400; ++k) {
      JointAction ja;
      for (auto id : w.cav_ids()) ja.emplace(id, DiscreteAction::from_index(act.below(9)));
      auto out = step(w, ja, cfg);
      w = std::move(out.next_state);
      trace.push_back(w);
    }
    return trace;
  };
  const auto a = run(5);
  const auto b = run(5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
  EXPECT_NE(a.back(), run(6).back());
}

TEST(Step, PureFunctionOfInputs)
{
  WorldState w;
  w.rng = Rng(9);
  insert_vehicle(w, VehicleKind::Hdv, 50, 1, 10, Intention::Straight);
  insert_vehicle(w, VehicleKind::Cav, 20, 2, 10, Intention::Left);
  const auto before = w;
  const auto a = step(w, keep_all(w), SimConfig{});
  const auto b = step(w, keep_all(w), SimConfig{});
  EXPECT_EQ(w, before);
  EXPECT_EQ(a.next_state, b.next_state);
}

TEST(Observe, SensingBallIsClosed)
{
  WorldState w;
  insert_vehicle(w, VehicleKind::Cav, 100, 1, 10, Intention::Straight);
  EXPECT_TRUE(observe(w, 1).neighbors.empty());
  insert_vehicle(w, VehicleKind::Hdv, 160, 1, 10, Intention::Straight);
  EXPECT_TRUE(observe(w, 1, 50.0).neighbors.empty());
  insert_vehicle(w, VehicleKind::Hdv, 150, 1, 10, Intention::Straight);
  const auto obs = observe(w, 1, 50.0);
  ASSERT_EQ(obs.neighbors.size(), 1U);
  EXPECT_DOUBLE_EQ(obs.neighbors[0].x_m, 50.0);
  EXPECT_DOUBLE_EQ(obs.neighbors[0].y_m, 0.0);
  EXPECT_THROW(observe(w, 42), ContractViolation);
}

TEST(Neighbors, LeaderAndFollowerPerLane)
{
  WorldState w;
  w.vehicles.push_back(hdv_at(1, 100, 1, 10));
  w.vehicles.push_back(hdv_at(2, 120, 1, 10));
  w.vehicles.push_back(hdv_at(3, 90, 1, 10));
  w.vehicles.push_back(hdv_at(4, 130, 2, 10));
  w.vehicles.push_back(hdv_at(5, 110, 2, 10));
  const auto nb = neighbors_of(w, w.vehicles[0]);
  ASSERT_NE(nb.current.leader, nullptr);
  EXPECT_EQ(nb.current.leader->id, 2U);
  EXPECT_EQ(nb.current.follower->id, 3U);
  EXPECT_EQ(nb.left.leader->id, 5U);
  EXPECT_EQ(nb.left.follower, nullptr);
  EXPECT_EQ(nb.right.leader, nullptr);
  EXPECT_EQ(same_lane_leader(w, w.vehicles[0])->id, 2U);
  EXPECT_EQ(leader_in_lanes(w, w.vehicles[0], 1, 2)->id, 5U);
}

}  // namespace
}  // namespace hdr
