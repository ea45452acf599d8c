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

#ifndef HDR__KINEMATICS_HPP_
#define HDR__KINEMATICS_HPP_

#include "hdr/random.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdr
{

using VehicleId = std::uint32_t;

/// Raised when a caller breaks an operation's preconditions.
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

enum class Intention : std::uint8_t { Left, Straight, Right };
enum class VehicleKind : std::uint8_t { Cav, Hdv };

/// Lane 0 is the rightmost lane; "left" increases the lane index. The no-op
/// members come first so action index 0 is keep lane / maintain speed.
enum class Lateral : std::uint8_t { Keep, ChangeLeft, ChangeRight };
enum class Longitudinal : std::uint8_t { Maintain, Accelerate, Decelerate };

struct DiscreteAction
{
  Lateral lateral{Lateral::Keep};
  Longitudinal longitudinal{Longitudinal::Maintain};

  static constexpr int kCount = 9;

  constexpr int index() const
  {
    return static_cast<int>(lateral) * 3 + static_cast<int>(longitudinal);
  }
  static constexpr DiscreteAction from_index(int i)
  {
    return {static_cast<Lateral>(i / 3), static_cast<Longitudinal>(i % 3)};
  }
  static constexpr DiscreteAction keep() { return {}; }

  friend constexpr bool operator==(DiscreteAction, DiscreteAction) = default;
};

/// Every element of the lateral x longitudinal product space, in index order.
constexpr std::array<DiscreteAction, DiscreteAction::kCount> all_actions()
{
  std::array<DiscreteAction, DiscreteAction::kCount> out{};
  for (int i = 0; i < DiscreteAction::kCount; ++i) {
    out[static_cast<std::size_t>(i)] = DiscreteAction::from_index(i);
  }
  return out;
}

/// Keyed by CAV id; the key set must equal the CAVs currently on the road.
using JointAction = std::map<VehicleId, DiscreteAction>;

std::string_view to_string(Intention i);
std::string_view to_string(VehicleKind k);
std::string_view to_string(Lateral l);
std::string_view to_string(Longitudinal l);
std::optional<Lateral> parse_lateral(std::string_view s);
std::optional<Longitudinal> parse_longitudinal(std::string_view s);
std::optional<VehicleKind> parse_kind(std::string_view s);

struct RoadGeometry
{
  double length_m{250.0};
  int lane_count{4};
  double lane_width_m{3.2};
  /// Bit i set when the lane permits Intention i.
  std::vector<std::uint8_t> lane_permissions{};

  /// Rightmost lane: right|straight, leftmost: left|straight, others straight.
  static RoadGeometry standard(double length_m = 250.0, int lane_count = 4, double lane_width_m = 3.2);

  bool permits(int lane, Intention intention) const;
  bool valid_lane(int lane) const { return lane >= 0 && lane < lane_count; }
  void validate() const;

  friend bool operator==(const RoadGeometry &, const RoadGeometry &) = default;
};

struct KinematicsParams
{
  /// Magnitude of the AC / DC longitudinal actions.
  double action_accel_mps2{1.0};
  double a_max_mps2{3.5};
  double v_max_mps{30.0};
  double lane_change_duration_s{1.0};
  double vehicle_length_m{5.0};

  friend bool operator==(const KinematicsParams &, const KinematicsParams &) = default;
};

struct LaneChange
{
  int target_lane{0};
  double remaining_s{0.0};

  friend bool operator==(const LaneChange &, const LaneChange &) = default;
};

struct VehicleState
{
  VehicleId id{0};
  VehicleKind kind{VehicleKind::Hdv};
  double x_m{0.0};
  int lane{0};
  double y_m{0.0};
  double v_x{0.0};
  double v_y{0.0};
  double a_x{0.0};
  Intention intention{Intention::Straight};
  int target_lane{0};
  /// Time since the last completed lane change, or since spawn if none yet.
  double t_since_lc_s{0.0};
  std::optional<LaneChange> lane_change{};
  /// Set when the last requested action was out of range and degraded to LK.
  bool degraded{false};

  bool is_cav() const { return kind == VehicleKind::Cav; }
  /// Lateral position in lane units.
  double y_lanes(const RoadGeometry & g) const { return y_m / g.lane_width_m; }
  /// True when the vehicle body overlaps `l` (origin or target of a change).
  bool occupies(int l) const
  {
    return lane == l || (lane_change && lane_change->target_lane == l);
  }

  friend bool operator==(const VehicleState &, const VehicleState &) = default;
};

struct WorldState
{
  double t_s{0.0};
  double dt_s{0.1};
  /// Sorted by id.
  std::vector<VehicleState> vehicles{};
  RoadGeometry geometry{RoadGeometry::standard()};
  Rng rng{0};
  VehicleId next_id{1};

  const VehicleState * find(VehicleId id) const;
  std::vector<VehicleId> cav_ids() const;
  std::size_t cav_count() const;
  void validate(const KinematicsParams & kin) const;

  friend bool operator==(const WorldState &, const WorldState &) = default;
};

int target_lane_for(Intention intention, int spawn_lane, const RoadGeometry & geometry);

/// Applies the lateral request to the lane-change state machine. Changes in
/// progress always run to completion; an out-of-range request degrades to LK.
void advance_lateral(
  VehicleState & v, Lateral request, double dt, const RoadGeometry & geometry,
  const KinematicsParams & kin);

/// Sets speed to `v_new` and integrates position with constant acceleration.
void advance_longitudinal(VehicleState & v, double v_new, double dt);

VehicleState apply_action_kinematics(
  const VehicleState & v, DiscreteAction a, double dt, const RoadGeometry & geometry,
  const KinematicsParams & kin = {});

}  // namespace hdr

#endif  // HDR__KINEMATICS_HPP_
