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

#ifndef HDR__TRAJECTORY_LOG_HPP_
#define HDR__TRAJECTORY_LOG_HPP_

#include "hdr/kinematics.hpp"
#include "hdr/rewards.hpp"
#include "hdr/traffic_sim.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hdr
{

/// One vehicle at the start of one decision interval.
struct LogRow
{
  double t{0.0};
  VehicleId id{0};
  VehicleKind kind{VehicleKind::Hdv};
  int lane{0};
  double x{0.0};
  double v_x{0.0};
  /// Acceleration applied over the interval that ended at `t`.
  double a_x{0.0};
  std::optional<Lateral> lat_action{};
  std::optional<Longitudinal> long_action{};
  double r_trd{0.0};
  double r_arg{0.0};
  double r_freq{0.0};
  double r_safe_j{0.0};

  friend bool operator==(const LogRow &, const LogRow &) = default;
};

enum class EventType : std::uint8_t { Exit, Collision };

struct LogEvent
{
  /// Time at the end of the step in which the event happened.
  double t{0.0};
  EventType type{EventType::Exit};
  VehicleId id{0};
  VehicleKind kind{VehicleKind::Hdv};
  /// Collision partner (collisions only).
  VehicleId other{0};
  VehicleKind other_kind{VehicleKind::Hdv};
  /// Exit lane served the intention (exits only).
  bool success{false};

  friend bool operator==(const LogEvent &, const LogEvent &) = default;
};

struct TrajectoryLog
{
  double dt{0.1};
  int steps{0};
  std::vector<LogRow> rows;
  std::vector<LogEvent> events;

  /// Records the pre-step world, the actions taken and the step's outcome.
  void append_step(
    const WorldState & world, const JointAction & actions, const StepOutcome & outcome,
    const RewardBreakdown & reward);

  double duration_s() const { return steps * dt; }
};

/// Step CSV: t,id,kind,lane,x,v_x,a_x,lat_action,long_action,r_trd,r_arg,r_freq,r_safe_j
void write_steps_csv(std::ostream & os, const TrajectoryLog & log);
/// Events CSV: t,event,id,kind,other,other_kind,success
void write_events_csv(std::ostream & os, const TrajectoryLog & log);

/// Parses both files back; `dt` must be supplied since rows only carry t.
/// Throws std::runtime_error on malformed input.
TrajectoryLog read_log(std::istream & steps_csv, std::istream & events_csv, double dt);

/// Shortest round-trip decimal form used in every emitted file.
std::string format_double(double v);

}  // namespace hdr

#endif  // HDR__TRAJECTORY_LOG_HPP_
