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

#ifndef HDR__EVALUATION_HPP_
#define HDR__EVALUATION_HPP_

#include "hdr/mcts.hpp"
#include "hdr/metrics.hpp"
#include "hdr/parallel.hpp"
#include "hdr/rewards.hpp"
#include "hdr/trajectory_log.hpp"
#include "hdr/traffic_sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace hdr
{

enum class Controller : std::uint8_t { Mcts, KeepLane };

std::string_view to_string(Controller c);
std::optional<Controller> parse_controller(std::string_view s);

/// Closed-loop episode layout. Initial vehicles sit on a lane x slot grid
/// with `slot_spacing_m` between slots, so every follower starts with a
/// Krauss-safe gap.
struct ScenarioConfig
{
  int initial_cavs{4};
  int initial_hdvs{6};
  double slot_spacing_m{25.0};
  int slots_per_lane{5};
  double horizon_s{30.0};
  /// End the episode once every CAV has left or crashed.
  bool stop_when_no_cavs{true};
  Controller controller{Controller::Mcts};

  void validate(const RoadGeometry & g) const;

  friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
};

/// Everything one closed-loop run depends on.
struct Experiment
{
  RoadGeometry geometry{RoadGeometry::standard()};
  double dt_s{0.1};
  SimConfig sim{};
  RewardParams reward{};
  SearchConfig search{};
  ScenarioConfig scenario{};
  AtsWeights ats{};

  void validate() const;

  friend bool operator==(const Experiment &, const Experiment &) = default;
};

/// Seeded initial world; draws come from the world's own stream.
WorldState make_initial_world(const Experiment & ex, std::uint64_t seed);

struct EpisodeResult
{
  std::uint64_t seed{0};
  MetricsReport metrics;
  TrajectoryLog log;
  /// Undiscounted sum of the variant's step rewards.
  double total_reward{0.0};
};

EpisodeResult run_episode(const Experiment & ex, RewardVariant variant, std::uint64_t seed);

struct PolicyEvaluation
{
  RewardVariant variant{RewardVariant::HDR};
  std::vector<EpisodeResult> episodes;
  AggregateReport aggregate;
};

/// One episode per seed; episodes are independent and may run concurrently.
/// Logs are dropped unless `keep_logs`.
PolicyEvaluation evaluate_policy(
  const Experiment & ex, RewardVariant variant, const std::vector<std::uint64_t> & seeds,
  ExecutionMode mode = ExecutionMode::Parallel, bool keep_logs = false);

struct SweepRow
{
  RewardVariant variant{RewardVariant::HDR};
  int budget{0};
  std::uint64_t seed{0};
  MetricsReport metrics;
};

/// Cells ordered variant-major, then budget, then seed. Throws
/// std::invalid_argument unless budgets are strictly increasing.
std::vector<SweepRow> budget_sweep(
  const Experiment & ex, const std::vector<int> & budgets, const std::vector<RewardVariant> & variants,
  const std::vector<std::uint64_t> & seeds, ExecutionMode mode = ExecutionMode::Parallel);

struct SweepCell
{
  RewardVariant variant{RewardVariant::HDR};
  int budget{0};
  MetricSummary ats;
  MetricSummary collisions_per_hour;
};

std::vector<SweepCell> summarize_sweep(const std::vector<SweepRow> & rows);

/// ATS per seed for one (variant, budget) cell, in seed order.
std::vector<double> sweep_ats(const std::vector<SweepRow> & rows, RewardVariant variant, int budget);

/// variant,budget,seed,ats,inst_flow,avg_velocity,avg_min_ttc,collisions_per_hour,
/// success_rate,avg_abs_jerk,avg_lc_interval,exits,collisions,duration_s
void write_sweep_csv(std::ostream & os, const std::vector<SweepRow> & rows);

/// Seeds 1..n, the default seed list of the experiments.
std::vector<std::uint64_t> seed_range(std::uint64_t first, int n);

}  // namespace hdr

#endif  // HDR__EVALUATION_HPP_
