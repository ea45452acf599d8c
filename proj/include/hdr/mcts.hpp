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

#ifndef HDR__MCTS_HPP_
#define HDR__MCTS_HPP_

#include "hdr/kinematics.hpp"
#include "hdr/rewards.hpp"
#include "hdr/traffic_sim.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace hdr
{

enum class RolloutPolicy : std::uint8_t { UniformRandom, GreedyArg };

std::string_view to_string(RolloutPolicy p);
std::optional<RolloutPolicy> parse_rollout_policy(std::string_view s);

/// Value term of the UCT score: raw mean return, or the mean rescaled to
/// [0, 1] by the range of returns backed up so far in the tree.
enum class UctScaling : std::uint8_t { Range, Raw };

std::string_view to_string(UctScaling s);
std::optional<UctScaling> parse_uct_scaling(std::string_view s);

struct SearchConfig
{
  int budget{200};
  double uct_c{1.41};
  int rollout_horizon{30};
  double discount{0.996};
  RolloutPolicy rollout_policy{RolloutPolicy::UniformRandom};
  UctScaling uct_scaling{UctScaling::Range};
  std::uint64_t determinization_seed_base{0};
  /// Largest CAV count a single search accepts.
  int max_cavs{4};
  /// Simulated time beyond which lookahead is truncated (episode end).
  double time_limit_s{std::numeric_limits<double>::infinity()};

  void validate() const;

  friend bool operator==(const SearchConfig &, const SearchConfig &) = default;
};

inline constexpr VehicleId kNoAgent = 0;

/// One decision of one CAV. The joint action of a world step is the path
/// through one node per CAV (ascending id), so a single tree spans the whole
/// joint-action space with branching 9 per level.
struct SearchNode
{
  /// Digest of the world at the start of this node's step, first visit.
  std::uint64_t state_digest{0};
  /// CAV deciding here; kNoAgent for a node whose step had no CAVs.
  VehicleId agent{kNoAgent};
  int step{0};
  /// 1 (creation) + sum of action_visits.
  int visits{1};
  std::array<int, DiscreteAction::kCount> action_visits{};
  std::array<double, DiscreteAction::kCount> value_sums{};
  std::array<std::int32_t, DiscreteAction::kCount> children{-1, -1, -1, -1, -1, -1, -1, -1, -1};
};

struct SearchTree
{
  std::vector<SearchNode> nodes;
  /// Range of backed-up returns.
  double min_return{std::numeric_limits<double>::infinity()};
  double max_return{-std::numeric_limits<double>::infinity()};
  int simulations{0};
  int max_depth_steps{0};
};

struct PlanResult
{
  JointAction action;
  SearchTree tree;
};

/// Runs `cfg.budget` UCT simulations from `world` and returns the robust
/// child at each CAV level of the first step. Throws ContractViolation when
/// the world has no CAVs or more than cfg.max_cavs.
PlanResult plan_with_tree(
  const WorldState & world, const SearchConfig & cfg, const SimConfig & sim, const RewardParams & params,
  const RewardStream & stream);

JointAction plan(
  const WorldState & world, const SearchConfig & cfg, const SimConfig & sim, const RewardParams & params,
  const RewardStream & stream);

std::uint64_t world_digest(const WorldState & world);

}  // namespace hdr

#endif  // HDR__MCTS_HPP_
