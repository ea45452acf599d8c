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

#include "hdr/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hdr
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

bool listed(const std::vector<VehicleId> & ids, VehicleId id)
{
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

void check_transition(const WorldState & world, const StepOutcome & outcome)
{
  const auto & next = outcome.next_state;
  for (const auto & v : next.vehicles) {
    if (!world.find(v.id) && !listed(outcome.spawned, v.id)) {
      throw ContractViolation("reward: vehicle " + std::to_string(v.id) + " appeared without a spawn");
    }
  }
  for (const auto & v : world.vehicles) {
    if (next.find(v.id)) continue;
    const bool exited = std::any_of(
      outcome.despawned.begin(), outcome.despawned.end(), [&](const Despawn & d) { return d.id == v.id; });
    if (!exited && !outcome.collided_this_step(v.id)) {
      throw ContractViolation("reward: vehicle " + std::to_string(v.id) + " vanished without an event");
    }
  }
}
}  // namespace

void RewardParams::validate() const
{
  if (std::abs(w_trd + w_arg - 1.0) > 1e-9) {
    throw ContractViolation("w_trd + w_arg must equal 1");
  }
  if (!(sigma > 0.0)) {
    throw ContractViolation("sigma must be positive");
  }
  if (!(zeta >= 0.0)) {
    throw ContractViolation("zeta must be non-negative");
  }
  if (!(ttc_crit > 0.0)) {
    throw ContractViolation("ttc_crit must be positive");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ContractViolation("gamma must lie in (0, 1]");
  }
  if (!(lambda_lc >= 0.0 && v_max > 0.0 && lane_width_m > 0.0 && vehicle_length_m > 0.0)) {
    throw ContractViolation("lambda_lc, v_max, lane width and vehicle length must be positive");
  }
  if (!(baseline_beta > 0.0 && baseline_beta < 1.0)) {
    throw ContractViolation("baseline_beta must lie in (0, 1)");
  }
}

std::string_view to_string(RewardVariant v)
{
  switch (v) {
    case RewardVariant::HDR:
      return "HDR";
    case RewardVariant::GNR:
      return "GNR";
    case RewardVariant::CTR:
      return "CTR";
    case RewardVariant::CTH:
      return "CTH";
  }
  return "?";
}

std::optional<RewardVariant> parse_variant(std::string_view s)
{
  for (auto v : {RewardVariant::HDR, RewardVariant::GNR, RewardVariant::CTR, RewardVariant::CTH}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

double RewardBreakdown::recompose(const RewardParams & p) const
{
  double cav = 0.0;
  if (!cavs.empty()) {
    for (const auto & c : cavs) {
      cav += p.w_hdr * c.main_term + p.w_freq * c.r_freq;
    }
    cav /= static_cast<double>(cavs.size());
  }
  return cav + p.w_flow * r_flow + p.w_safe * r_safe - baseline;
}

double potential(const VehicleState & v, const RewardParams & p)
{
  const double dx = p.x_goal_m - v.x_m;
  const double dy = v.y_m / p.lane_width_m - v.target_lane;
  return std::exp(-dx * dx / (2.0 * p.sigma * p.sigma)) / (p.zeta * std::abs(dy) + 1.0);
}

PotentialGradient potential_gradient(const VehicleState & v, const RewardParams & p)
{
  const double phi = potential(v, p);
  const double dy = v.y_m / p.lane_width_m - v.target_lane;
  PotentialGradient g;
  g.d_dx = phi * (p.x_goal_m - v.x_m) / (p.sigma * p.sigma);
  if (dy != 0.0) {
    const double sign = dy > 0.0 ? 1.0 : -1.0;
    g.d_dy = -phi * p.zeta * sign / (p.zeta * std::abs(dy) + 1.0);
  }
  return g;
}

double r_trd(const VehicleState & v, const RewardParams & p)
{
  const auto g = potential_gradient(v, p);
  return g.d_dx * v.v_x + g.d_dy * (v.v_y / p.lane_width_m);
}

double r_arg(DiscreteAction a, const VehicleState & v, const RewardParams & p)
{
  if (a.longitudinal == Longitudinal::Accelerate) return 1.0;
  if (a.longitudinal == Longitudinal::Maintain && v.v_x >= p.v_thres) return 1.0;
  return 0.0;
}

double r_hdr(double trd, double arg, const RewardParams & p) { return p.w_trd * trd + p.w_arg * arg; }

double r_hdr(DiscreteAction a, const VehicleState & v, const RewardParams & p)
{
  return r_hdr(r_trd(v, p), r_arg(a, v, p), p);
}

SafetyTerm r_safe_vehicle(
  const VehicleState & self, const VehicleState * leader, const RewardParams & p, bool collided)
{
  SafetyTerm s{kInf, 0.0};
  if (leader) {
    const double h = leader->x_m - self.x_m - p.vehicle_length_m;
    if (self.v_x > leader->v_x && h > 0.0) {
      s.ttc = h / (self.v_x - leader->v_x);
    }
  }
  if (collided) {
    s.penalty = -1.0;
  } else if (s.ttc > 0.0 && s.ttc < p.ttc_crit) {
    s.penalty = -1.0 + std::exp(1.0 / p.ttc_crit - 1.0 / s.ttc);
  }
  return s;
}

double r_flow(const WorldState & world, const RewardParams & p)
{
  if (world.vehicles.empty()) return 0.0;
  double sum = 0.0;
  for (const auto & v : world.vehicles) sum += v.v_x / p.v_max;
  return sum / static_cast<double>(world.vehicles.size());
}

double r_freq(const VehicleState & v, const RewardParams & p) { return -std::exp(-p.lambda_lc * v.t_since_lc_s); }

RewardBreakdown evaluate_reward(
  const WorldState & world, const StepOutcome & outcome, const JointAction & joint_action,
  const RewardParams & p, RewardVariant variant, double baseline)
{
  check_transition(world, outcome);
  const auto & next = outcome.next_state;

  RewardBreakdown rb;
  rb.variant = variant;
  const bool differential = uses_differential_term(variant);
  for (const auto & v : world.vehicles) {
    if (!v.is_cav()) continue;
    const auto act = joint_action.find(v.id);
    if (act == joint_action.end()) {
      throw ContractViolation("reward: no action recorded for CAV " + std::to_string(v.id));
    }
    const VehicleState * after = next.find(v.id);
    if (!after) continue;  // exited or collided this step
    CavRewardTerms t;
    t.id = v.id;
    t.r_trd = r_trd(*after, p);
    t.r_arg = r_arg(act->second, v, p);
    t.r_hdr = r_hdr(t.r_trd, t.r_arg, p);
    t.r_freq = r_freq(*after, p);
    t.phi_next = potential(*after, p);
    t.main_term = differential ? t.r_hdr : t.phi_next;
    rb.cavs.push_back(t);
  }
  if (!rb.cavs.empty()) {
    double sum = 0.0;
    for (const auto & c : rb.cavs) sum += p.w_hdr * c.main_term + p.w_freq * c.r_freq;
    rb.cav_term = sum / static_cast<double>(rb.cavs.size());
  }

  rb.r_flow = r_flow(next, p);

  double safe = 0.0;
  for (const auto & v : next.vehicles) {
    const auto s = r_safe_vehicle(v, same_lane_leader(next, v), p);
    rb.safety.push_back({v.id, s.ttc, s.penalty, false});
    safe += s.penalty;
  }
  for (const auto & [id, kind] : outcome.collided) {
    rb.safety.push_back({id, 0.0, -1.0, true});
    safe += -1.0;
  }
  rb.r_safe = safe;

  rb.raw_total = rb.cav_term + p.w_flow * rb.r_flow + p.w_safe * rb.r_safe;
  rb.baseline = is_centered(variant) ? baseline : 0.0;
  rb.total = rb.raw_total - rb.baseline;
  return rb;
}

RewardBreakdown total_reward(
  const WorldState & world, const StepOutcome & outcome, const JointAction & joint_action,
  const RewardParams & p, RewardStream & stream)
{
  auto rb = evaluate_reward(world, outcome, joint_action, p, stream.variant, stream.rho_hat);
  if (is_centered(stream.variant)) {
    stream.rho_hat += stream.beta * (rb.raw_total - stream.rho_hat);
  }
  return rb;
}

std::pair<double, double> reward_bounds(
  const RewardParams & p, RewardVariant variant, std::size_t max_vehicles,
  double max_lateral_rate_lanes_per_s)
{
  // |d(phi)/dx| peaks at exp(-1/2) / sigma; |d(phi)/dy| <= zeta.
  const double trd_max =
    p.v_max * std::exp(-0.5) / p.sigma + p.zeta * max_lateral_rate_lanes_per_s;
  double main_lo = 0.0;
  double main_hi = 1.0;
  if (uses_differential_term(variant)) {
    main_lo = -p.w_trd * trd_max;
    main_hi = p.w_trd * trd_max + p.w_arg;
  }
  const double cav_lo = std::min(0.0, p.w_hdr * main_lo - p.w_freq);
  const double cav_hi = std::max(0.0, p.w_hdr * main_hi);
  const double lo = cav_lo - p.w_safe * static_cast<double>(max_vehicles);
  const double hi = cav_hi + p.w_flow;
  if (!is_centered(variant)) return {lo, hi};
  // The baseline is a convex mix of 0 and past raw rewards.
  const double rho_lo = std::min(lo, 0.0);
  const double rho_hi = std::max(hi, 0.0);
  return {lo - rho_hi, hi - rho_lo};
}

}  // namespace hdr
