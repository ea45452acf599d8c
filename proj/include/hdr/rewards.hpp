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

#ifndef HDR__REWARDS_HPP_
#define HDR__REWARDS_HPP_

#include "hdr/kinematics.hpp"
#include "hdr/traffic_sim.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace hdr
{

/// Reward weights and shaping constants. Defaults are the published
/// simulation settings; `x_goal_m` and `lane_width_m` mirror the road.
struct RewardParams
{
  double gamma{0.996};
  double sigma{60.0};
  double zeta{1.0};
  double v_thres{28.0};
  double ttc_crit{3.0};
  double lambda_lc{0.75};
  double w_trd{0.9};
  double w_arg{0.1};
  double w_hdr{10.0};
  double w_flow{1.0};
  double w_safe{2.0};
  double w_freq{0.9};
  double x_goal_m{250.0};
  double v_max{30.0};
  double lane_width_m{3.2};
  double vehicle_length_m{5.0};
  /// EMA rate of the centering baseline (CTR / CTH).
  double baseline_beta{0.01};

  void validate() const;

  friend bool operator==(const RewardParams &, const RewardParams &) = default;
};

enum class RewardVariant : std::uint8_t { HDR, GNR, CTR, CTH };

std::string_view to_string(RewardVariant v);
std::optional<RewardVariant> parse_variant(std::string_view s);
constexpr bool is_centered(RewardVariant v) { return v == RewardVariant::CTR || v == RewardVariant::CTH; }
/// HDR and CTH share the differential per-CAV term; GNR and CTR the state term.
constexpr bool uses_differential_term(RewardVariant v)
{
  return v == RewardVariant::HDR || v == RewardVariant::CTH;
}

/// One evaluation stream. CTR/CTH keep an EMA baseline that moves only when
/// `total_reward` observes a reward; HDR/GNR ignore it.
struct RewardStream
{
  RewardVariant variant{RewardVariant::HDR};
  double rho_hat{0.0};
  double beta{0.01};
};

struct PotentialGradient
{
  double d_dx{0.0};
  double d_dy{0.0};
};

struct SafetyTerm
{
  /// +inf when the vehicle is not closing on a leader.
  double ttc{0.0};
  double penalty{0.0};
};

struct CavRewardTerms
{
  VehicleId id{0};
  double r_trd{0.0};
  double r_arg{0.0};
  double r_hdr{0.0};
  double r_freq{0.0};
  double phi_next{0.0};
  /// r_hdr for HDR/CTH, phi_next for GNR/CTR; weighted by w_hdr in the total.
  double main_term{0.0};
};

struct VehicleSafety
{
  VehicleId id{0};
  double ttc{0.0};
  double r_safe{0.0};
  bool collided{false};
};

struct RewardBreakdown
{
  RewardVariant variant{RewardVariant::HDR};
  std::vector<CavRewardTerms> cavs;
  std::vector<VehicleSafety> safety;
  /// (1/|N_CAV|) sum of (w_hdr * main_term + w_freq * r_freq); 0 without CAVs.
  double cav_term{0.0};
  double r_flow{0.0};
  double r_safe{0.0};
  /// Before centering.
  double raw_total{0.0};
  /// Baseline subtracted from raw_total (0 for HDR/GNR).
  double baseline{0.0};
  double total{0.0};

  /// Recomputes the composite from the stored components.
  double recompose(const RewardParams & p) const;
};

double potential(const VehicleState & v, const RewardParams & p);
PotentialGradient potential_gradient(const VehicleState & v, const RewardParams & p);

/// d(phi)/dt along the vehicle's velocity; lateral speed in lanes per second.
double r_trd(const VehicleState & v, const RewardParams & p);

/// Gradient-sign indicator over longitudinal actions.
double r_arg(DiscreteAction a, const VehicleState & v, const RewardParams & p);

double r_hdr(double trd, double arg, const RewardParams & p);
double r_hdr(DiscreteAction a, const VehicleState & v, const RewardParams & p);

SafetyTerm r_safe_vehicle(
  const VehicleState & self, const VehicleState * leader, const RewardParams & p, bool collided = false);

double r_flow(const WorldState & world, const RewardParams & p);
double r_freq(const VehicleState & v, const RewardParams & p);

/// Evaluates one transition without touching any baseline.
RewardBreakdown evaluate_reward(
  const WorldState & world, const StepOutcome & outcome, const JointAction & joint_action,
  const RewardParams & p, RewardVariant variant, double baseline = 0.0);

/// Evaluates one transition and, for centered variants, advances the stream's
/// baseline with the observed raw reward.
RewardBreakdown total_reward(
  const WorldState & world, const StepOutcome & outcome, const JointAction & joint_action,
  const RewardParams & p, RewardStream & stream);

/// Per-step reward range for a world holding at most `max_vehicles` vehicles.
std::pair<double, double> reward_bounds(
  const RewardParams & p, RewardVariant variant, std::size_t max_vehicles,
  double max_lateral_rate_lanes_per_s);

}  // namespace hdr

#endif  // HDR__REWARDS_HPP_
