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

#include "hdr/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace hdr
{

namespace
{
constexpr double kLaneChangeEps = 1e-9;

std::uint8_t bit(Intention i) { return static_cast<std::uint8_t>(1U << static_cast<unsigned>(i)); }
}  // namespace

std::string_view to_string(Intention i)
{
  switch (i) {
    case Intention::Left:
      return "left";
    case Intention::Straight:
      return "straight";
    case Intention::Right:
      return "right";
  }
  return "?";
}

std::string_view to_string(VehicleKind k) { return k == VehicleKind::Cav ? "CAV" : "HDV"; }

std::string_view to_string(Lateral l)
{
  switch (l) {
    case Lateral::ChangeLeft:
      return "LC";
    case Lateral::Keep:
      return "LK";
    case Lateral::ChangeRight:
      return "RC";
  }
  return "?";
}

std::string_view to_string(Longitudinal l)
{
  switch (l) {
    case Longitudinal::Accelerate:
      return "AC";
    case Longitudinal::Maintain:
      return "MT";
    case Longitudinal::Decelerate:
      return "DC";
  }
  return "?";
}

std::optional<Lateral> parse_lateral(std::string_view s)
{
  if (s == "LC") return Lateral::ChangeLeft;
  if (s == "LK") return Lateral::Keep;
  if (s == "RC") return Lateral::ChangeRight;
  return std::nullopt;
}

std::optional<Longitudinal> parse_longitudinal(std::string_view s)
{
  if (s == "AC") return Longitudinal::Accelerate;
  if (s == "MT") return Longitudinal::Maintain;
  if (s == "DC") return Longitudinal::Decelerate;
  return std::nullopt;
}

std::optional<VehicleKind> parse_kind(std::string_view s)
{
  if (s == "CAV") return VehicleKind::Cav;
  if (s == "HDV") return VehicleKind::Hdv;
  return std::nullopt;
}

RoadGeometry RoadGeometry::standard(double length_m, int lane_count, double lane_width_m)
{
  RoadGeometry g;
  g.length_m = length_m;
  g.lane_count = lane_count;
  g.lane_width_m = lane_width_m;
  g.lane_permissions.assign(static_cast<std::size_t>(std::max(lane_count, 0)), bit(Intention::Straight));
  if (lane_count > 0) {
    g.lane_permissions.front() |= bit(Intention::Right);
    g.lane_permissions.back() |= bit(Intention::Left);
  }
  return g;
}

bool RoadGeometry::permits(int lane, Intention intention) const
{
  if (!valid_lane(lane)) {
    return false;
  }
  return (lane_permissions[static_cast<std::size_t>(lane)] & bit(intention)) != 0;
}

void RoadGeometry::validate() const
{
  if (!(length_m > 0.0)) {
    throw ContractViolation("road length must be positive");
  }
  if (lane_count < 2) {
    throw ContractViolation("road needs at least two lanes");
  }
  if (!(lane_width_m > 0.0)) {
    throw ContractViolation("lane width must be positive");
  }
  if (lane_permissions.size() != static_cast<std::size_t>(lane_count)) {
    throw ContractViolation("lane permission table does not match lane count");
  }
  for (auto p : lane_permissions) {
    if ((p & 0x7) == 0) {
      throw ContractViolation("every lane must permit at least one intention");
    }
  }
}

const VehicleState * WorldState::find(VehicleId id) const
{
  auto it = std::lower_bound(
    vehicles.begin(), vehicles.end(), id,
    [](const VehicleState & v, VehicleId key) { return v.id < key; });
  if (it == vehicles.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

std::vector<VehicleId> WorldState::cav_ids() const
{
  std::vector<VehicleId> ids;
  for (const auto & v : vehicles) {
    if (v.is_cav()) {
      ids.push_back(v.id);
    }
  }
  return ids;
}

std::size_t WorldState::cav_count() const
{
  return static_cast<std::size_t>(
    std::count_if(vehicles.begin(), vehicles.end(), [](const VehicleState & v) { return v.is_cav(); }));
}

void WorldState::validate(const KinematicsParams & kin) const
{
  geometry.validate();
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto & v = vehicles[i];
    if (i > 0 && vehicles[i - 1].id >= v.id) {
      throw ContractViolation("vehicle ids must be unique and sorted");
    }
    if (v.x_m < 0.0 || v.x_m > geometry.length_m) {
      throw ContractViolation("vehicle " + std::to_string(v.id) + " is off the road segment");
    }
    if (!geometry.valid_lane(v.lane)) {
      throw ContractViolation("vehicle " + std::to_string(v.id) + " has an invalid lane");
    }
    if (v.v_x < 0.0 || v.v_x > kin.v_max_mps) {
      throw ContractViolation("vehicle " + std::to_string(v.id) + " speed out of range");
    }
    if (v.t_since_lc_s < 0.0) {
      throw ContractViolation("negative time since lane change");
    }
    if (!geometry.permits(v.target_lane, v.intention)) {
      throw ContractViolation("target lane does not permit the vehicle's intention");
    }
  }
}

int target_lane_for(Intention intention, int spawn_lane, const RoadGeometry & geometry)
{
  if (!geometry.valid_lane(spawn_lane)) {
    throw ContractViolation("spawn lane out of range");
  }
  switch (intention) {
    case Intention::Left:
      return geometry.lane_count - 1;
    case Intention::Right:
      return 0;
    case Intention::Straight:
      break;
  }
  return spawn_lane;
}

void advance_lateral(
  VehicleState & v, Lateral request, double dt, const RoadGeometry & geometry,
  const KinematicsParams & kin)
{
  v.degraded = false;
  const double w = geometry.lane_width_m;
  const double duration = kin.lane_change_duration_s;

  if (!v.lane_change && request != Lateral::Keep) {
    const int target = v.lane + (request == Lateral::ChangeLeft ? 1 : -1);
    if (geometry.valid_lane(target)) {
      v.lane_change = LaneChange{target, duration};
    } else {
      v.degraded = true;
    }
  }

  if (!v.lane_change) {
    v.v_y = 0.0;
    v.y_m = v.lane * w;
    v.t_since_lc_s += dt;
    return;
  }

  auto & lc = *v.lane_change;
  const double dir = lc.target_lane > v.lane ? 1.0 : -1.0;
  lc.remaining_s -= dt;
  if (lc.remaining_s <= kLaneChangeEps) {
    v.lane = lc.target_lane;
    v.lane_change.reset();
    v.y_m = v.lane * w;
    v.v_y = 0.0;
    v.t_since_lc_s = 0.0;
    return;
  }
  const double progress = 1.0 - lc.remaining_s / duration;
  v.y_m = (v.lane + dir * progress) * w;
  v.v_y = dir * w / duration;
  v.t_since_lc_s += dt;
}

void advance_longitudinal(VehicleState & v, double v_new, double dt)
{
  // Trapezoidal update is exact for constant acceleration within the step.
  v.a_x = (v_new - v.v_x) / dt;
  v.x_m += 0.5 * (v.v_x + v_new) * dt;
  v.v_x = v_new;
}

VehicleState apply_action_kinematics(
  const VehicleState & v, DiscreteAction a, double dt, const RoadGeometry & geometry,
  const KinematicsParams & kin)
{
  VehicleState out = v;
  const double mag = std::min(kin.action_accel_mps2, kin.a_max_mps2);
  double accel = 0.0;
  switch (a.longitudinal) {
    case Longitudinal::Accelerate:
      accel = mag;
      break;
    case Longitudinal::Maintain:
      break;
    case Longitudinal::Decelerate:
      accel = -mag;
      break;
  }
  const double v_new = std::clamp(v.v_x + accel * dt, 0.0, kin.v_max_mps);
  advance_longitudinal(out, v_new, dt);
  advance_lateral(out, a.lateral, dt, geometry, kin);
  return out;
}

}  // namespace hdr
