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

#ifndef HDR__SNR_DIAGNOSTIC_HPP_
#define HDR__SNR_DIAGNOSTIC_HPP_

#include "hdr/evaluation.hpp"
#include "hdr/parallel.hpp"
#include "hdr/rewards.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hdr
{

struct ProbeSpec
{
  int count{240};
  /// Background HDVs placed with the single CAV.
  int initial_hdvs{6};
  /// Steps between recorded states along a rollout.
  int stride{4};
  /// Probe CAVs must be at least this far from the road end.
  double exit_margin_m{20.0};
  std::uint64_t seed{11};
};

/// Single-CAV states recorded along uniformly random CAV rollouts. A state is
/// kept only when no one-step action leads to an exit or a collision of the
/// CAV, so all nine outcomes are comparable.
std::vector<WorldState> sample_probe_states(const Experiment & ex, const ProbeSpec & spec);

/// The nine one-step rewards of a probe state; index = action index.
struct ActionRewards
{
  std::array<double, DiscreteAction::kCount> total{};
  /// w_hdr * main term of the CAV.
  std::array<double, DiscreteAction::kCount> main{};
};

ActionRewards probe_actions(const WorldState & state, const Experiment & ex, RewardVariant variant);

struct GapDistribution
{
  RewardVariant variant{RewardVariant::HDR};
  /// Per state: max pairwise |total difference| over the nine actions.
  std::vector<double> max_gap;
  /// Per state: max |main difference| between longitudinal actions sharing a
  /// lateral action.
  std::vector<double> longitudinal_gap;
  /// Per state: min over lateral actions of main(AC) - main(DC).
  std::vector<double> accel_minus_decel;
  double mean{0.0};
  double p5{0.0};
  double p95{0.0};
};

std::vector<GapDistribution> action_gap_probe(
  const std::vector<WorldState> & states, const Experiment & ex, const std::vector<RewardVariant> & variants,
  ExecutionMode mode = ExecutionMode::Parallel);

void write_gap_json(std::ostream & os, const std::vector<GapDistribution> & dists);

struct SurfaceSpec
{
  double x_step_m{5.0};
  double probe_speed_mps{15.0};
  /// Lane the probe vehicle is asked to reach (intention Right -> lane 0).
  Intention intention{Intention::Right};
};

/// Grids indexed [lane][x]; lateral order LC, LK, RC.
struct RewardSurface
{
  RewardVariant variant{RewardVariant::HDR};
  std::vector<double> xs;
  int lanes{0};
  std::array<std::vector<std::vector<double>>, 3> grids;
  std::vector<std::vector<double>> phi;
};

/// Per-CAV reward term of the variant for each lateral action at each cell.
/// Differential variants read the velocity field of the action in place;
/// state variants score the lane the action lands in.
RewardSurface reward_surface(
  RewardVariant variant, const Experiment & ex, const SurfaceSpec & spec = {},
  ExecutionMode mode = ExecutionMode::Parallel);

/// First row "lane,x0,x1,..." then one row per lane.
void write_grid_csv(std::ostream & os, const std::vector<double> & xs, const std::vector<std::vector<double>> & grid);

}  // namespace hdr

#endif  // HDR__SNR_DIAGNOSTIC_HPP_
