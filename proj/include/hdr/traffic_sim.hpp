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

#ifndef HDR__TRAFFIC_SIM_HPP_
#define HDR__TRAFFIC_SIM_HPP_

#include "hdr/kinematics.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace hdr
{

struct HdvParams
{
  double b_decel{9.0};
  double t_react{1.1};
  double eps_imperfection{0.5};
  double v_max{30.0};
  double a_free{2.5};
  /// Required free-speed advantage (m/s) before a discretionary lane change.
  double lc_gain{2.0};
  /// Fraction of b_decel a lane change may force on the new follower.
  double lc_politeness{1.0};

  void validate() const;

  friend bool operator==(const HdvParams &, const HdvParams &) = default;
};

struct SpawnConfig
{
  double arrival_rate_per_lane{0.1};
  double cav_fraction{0.4};
  double v0_min{8.0};
  double v0_max{12.0};
  double min_spawn_gap_m{10.0};
  /// Arrivals drawn as CAV while this many CAVs are present spawn as HDVs.
  int max_cavs{4};

  void validate(double v_max) const;

  friend bool operator==(const SpawnConfig &, const SpawnConfig &) = default;
};

struct SimConfig
{
  KinematicsParams kin{};
  HdvParams hdv{};
  SpawnConfig spawn{};
  double sensing_radius_m{50.0};

  void validate() const;

  friend bool operator==(const SimConfig &, const SimConfig &) = default;
};

struct Despawn
{
  VehicleId id{0};
  VehicleKind kind{VehicleKind::Hdv};
  bool success{false};
};

struct StepOutcome
{
  WorldState next_state;
  std::vector<std::pair<VehicleId, VehicleId>> collisions;
  std::vector<Despawn> despawned;
  std::vector<VehicleId> spawned;
  /// Lane-change decision taken by every HDV this step.
  std::vector<std::pair<VehicleId, Lateral>> hdv_decisions;
  /// Vehicles removed by a collision this step, sorted, with kinds.
  std::vector<std::pair<VehicleId, VehicleKind>> collided;

  bool collided_this_step(VehicleId id) const;
};

struct LaneNeighbors
{
  const VehicleState * leader{nullptr};
  const VehicleState * follower{nullptr};
};

/// Nearest leader/follower in the current and both adjacent lanes. A vehicle
/// mid lane change counts as present in both its origin and target lane.
struct Neighborhood
{
  LaneNeighbors left{};
  LaneNeighbors current{};
  LaneNeighbors right{};
};

Neighborhood neighbors_of(const WorldState & world, const VehicleState & self);

/// Nearest vehicle strictly ahead whose body overlaps any of `lanes`.
const VehicleState * leader_in_lanes(
  const WorldState & world, const VehicleState & self, int lane_a, int lane_b);

/// Nearest vehicle strictly ahead with the same lane index.
const VehicleState * same_lane_leader(const WorldState & world, const VehicleState & self);

/// Bumper-to-bumper gap from `rear` to `front`.
double gap_between(const VehicleState & rear, const VehicleState & front, const KinematicsParams & kin);

/// Krauss safe speed against a leader; +inf without one.
double krauss_safe_speed(double v_self, double v_leader, double gap, const HdvParams & p);

double hdv_follow_speed(
  const VehicleState & self, const VehicleState * leader, const HdvParams & p, double dt,
  Rng & rng, const KinematicsParams & kin = {});

/// Same as above with the imperfection draw supplied by the caller.
double hdv_follow_speed_with_draw(
  const VehicleState & self, const VehicleState * leader, const HdvParams & p, double dt,
  double u, const KinematicsParams & kin = {});

Lateral hdv_lane_change_decision(
  const VehicleState & self, const Neighborhood & nb, const RoadGeometry & geometry,
  const HdvParams & p, double dt, const KinematicsParams & kin = {});

/// Advances the world by one decision interval. Throws ContractViolation when
/// the action key set differs from the current CAV ids.
StepOutcome step(const WorldState & world, const JointAction & cav_actions, const SimConfig & cfg);

/// Inserts a freshly spawned vehicle (id taken from world.next_id).
VehicleState & insert_vehicle(
  WorldState & world, VehicleKind kind, double x_m, int lane, double v_x, Intention intention);

struct Observation
{
  VehicleState self;
  /// Neighbours with positions relative to self (x, y shifted).
  std::vector<VehicleState> neighbors;
};

Observation observe(const WorldState & world, VehicleId id, double radius_m = 50.0);

}  // namespace hdr

#endif  // HDR__TRAFFIC_SIM_HPP_
