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

#include "hdr/snr_diagnostic.hpp"

#include "hdr/trajectory_log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hdr
{

namespace
{
constexpr std::uint64_t kProbePolicyStream = 77;

double percentile(std::vector<double> xs, double q)
{
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// True when every action keeps the CAV on the road and out of collisions.
bool comparable(const WorldState & w, VehicleId cav, const Experiment & ex)
{
  if (!w.find(cav)) return false;
  for (const auto a : all_actions()) {
    const auto out = step(w, JointAction{{cav, a}}, ex.sim);
    if (!out.next_state.find(cav)) return false;
  }
  return true;
}

int lateral_delta(Lateral l) { return l == Lateral::ChangeLeft ? 1 : (l == Lateral::ChangeRight ? -1 : 0); }
}  // namespace

std::vector<WorldState> sample_probe_states(const Experiment & ex, const ProbeSpec & spec)
{
  Experiment rollout = ex;
  rollout.scenario.initial_cavs = 1;
  rollout.scenario.initial_hdvs = spec.initial_hdvs;
  rollout.sim.spawn.cav_fraction = 0.0;
  rollout.validate();

  std::vector<WorldState> out;
  const double x_limit = ex.geometry.length_m - spec.exit_margin_m;
  for (std::uint64_t r = 0; static_cast<int>(out.size()) < spec.count; ++r) {
    if (r > static_cast<std::uint64_t>(spec.count) * 50) {
      throw ContractViolation("probe sampling could not collect enough single-CAV states");
    }
    WorldState w = make_initial_world(rollout, mix_seed(spec.seed, r));
    Rng policy(mix_seed(spec.seed ^ kProbePolicyStream, r));
    for (int k = 0; w.cav_count() == 1 && w.t_s < ex.scenario.horizon_s; ++k) {
      const VehicleId cav = w.cav_ids().front();
      const auto * v = w.find(cav);
      if (k % spec.stride == 0 && v->x_m <= x_limit && comparable(w, cav, ex)) {
        out.push_back(w);
        if (static_cast<int>(out.size()) == spec.count) break;
      }
      const auto a = DiscreteAction::from_index(policy.below(DiscreteAction::kCount));
      w = step(w, JointAction{{cav, a}}, ex.sim).next_state;
    }
  }
  return out;
}

ActionRewards probe_actions(const WorldState & state, const Experiment & ex, RewardVariant variant)
{
  const auto cavs = state.cav_ids();
  if (cavs.size() != 1) throw ContractViolation("probe states must hold exactly one CAV");
  const VehicleId id = cavs.front();
  ActionRewards ar;
  for (const auto a : all_actions()) {
    const JointAction ja{{id, a}};
    const auto out = step(state, ja, ex.sim);
    const auto rb = evaluate_reward(state, out, ja, ex.reward, variant, 0.0);
    const auto i = static_cast<std::size_t>(a.index());
    ar.total[i] = rb.total;
    ar.main[i] = rb.cavs.empty() ? 0.0 : ex.reward.w_hdr * rb.cavs.front().main_term;
  }
  return ar;
}

std::vector<GapDistribution> action_gap_probe(
  const std::vector<WorldState> & states, const Experiment & ex, const std::vector<RewardVariant> & variants,
  ExecutionMode mode)
{
  std::vector<GapDistribution> out;
  for (const auto variant : variants) {
    GapDistribution d;
    d.variant = variant;
    d.max_gap.resize(states.size());
    d.longitudinal_gap.resize(states.size());
    d.accel_minus_decel.resize(states.size());
    for_each_index(static_cast<std::int64_t>(states.size()), mode, [&](std::int64_t si) {
      const auto i = static_cast<std::size_t>(si);
      const auto ar = probe_actions(states[i], ex, variant);
      const auto [lo, hi] = std::minmax_element(ar.total.begin(), ar.total.end());
      d.max_gap[i] = *hi - *lo;
      double lon = 0.0;
      double flip = std::numeric_limits<double>::infinity();
      constexpr std::array<Longitudinal, 3> lons{
        Longitudinal::Accelerate, Longitudinal::Maintain, Longitudinal::Decelerate};
      for (const auto lat : {Lateral::ChangeLeft, Lateral::Keep, Lateral::ChangeRight}) {
        auto at = [&](Longitudinal l) { return ar.main[static_cast<std::size_t>(DiscreteAction{lat, l}.index())]; };
        for (std::size_t a = 0; a < 3; ++a) {
          for (std::size_t b = a + 1; b < 3; ++b) lon = std::max(lon, std::abs(at(lons[a]) - at(lons[b])));
        }
        flip = std::min(flip, at(Longitudinal::Accelerate) - at(Longitudinal::Decelerate));
      }
      d.longitudinal_gap[i] = lon;
      d.accel_minus_decel[i] = flip;
    });
    double sum = 0.0;
    for (double g : d.max_gap) sum += g;
    d.mean = d.max_gap.empty() ? 0.0 : sum / static_cast<double>(d.max_gap.size());
    d.p5 = percentile(d.max_gap, 0.05);
    d.p95 = percentile(d.max_gap, 0.95);
    out.push_back(std::move(d));
  }
  return out;
}

void write_gap_json(std::ostream & os, const std::vector<GapDistribution> & dists)
{
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto & d : dists) {
    nlohmann::ordered_json e;
    e["variant"] = std::string(to_string(d.variant));
    e["states"] = d.max_gap.size();
    e["mean"] = d.mean;
    e["p5"] = d.p5;
    e["p95"] = d.p95;
    e["max_longitudinal_gap"] =
      d.longitudinal_gap.empty() ? 0.0 : *std::max_element(d.longitudinal_gap.begin(), d.longitudinal_gap.end());
    e["min_accel_minus_decel"] =
      d.accel_minus_decel.empty() ? 0.0 : *std::min_element(d.accel_minus_decel.begin(), d.accel_minus_decel.end());
    e["max_gap"] = d.max_gap;
    j.push_back(std::move(e));
  }
  os << j.dump(2) << '\n';
}

RewardSurface reward_surface(RewardVariant variant, const Experiment & ex, const SurfaceSpec & spec, ExecutionMode mode)
{
  if (!(spec.x_step_m > 0.0)) throw ContractViolation("surface x step must be positive");
  const auto & g = ex.geometry;
  const auto & p = ex.reward;
  RewardSurface surf;
  surf.variant = variant;
  surf.lanes = g.lane_count;
  const auto nx = static_cast<std::size_t>(std::floor(g.length_m / spec.x_step_m + 1e-9)) + 1;
  for (std::size_t i = 0; i < nx; ++i) surf.xs.push_back(std::min(g.length_m, static_cast<double>(i) * spec.x_step_m));
  const auto lanes = static_cast<std::size_t>(g.lane_count);
  for (auto & grid : surf.grids) grid.assign(lanes, std::vector<double>(nx, 0.0));
  surf.phi.assign(lanes, std::vector<double>(nx, 0.0));

  const int target = target_lane_for(spec.intention, 0, g);
  auto probe = [&](double x, int lane) {
    VehicleState v;
    v.kind = VehicleKind::Cav;
    v.x_m = x;
    v.lane = lane;
    v.y_m = lane * g.lane_width_m;
    v.v_x = spec.probe_speed_mps;
    v.intention = spec.intention;
    v.target_lane = target;
    return v;
  };
  const bool differential = uses_differential_term(variant);
  const std::array<Lateral, 3> lats{Lateral::ChangeLeft, Lateral::Keep, Lateral::ChangeRight};

  for_each_index(static_cast<std::int64_t>(lanes * nx), mode, [&](std::int64_t cell) {
    const auto lane = static_cast<std::size_t>(cell) / nx;
    const auto xi = static_cast<std::size_t>(cell) % nx;
    const double x = surf.xs[xi];
    const int l = static_cast<int>(lane);
    surf.phi[lane][xi] = potential(probe(x, l), p);
    for (std::size_t k = 0; k < 3; ++k) {
      const int landing = l + lateral_delta(lats[k]);
      const bool legal = g.valid_lane(landing);
      double value = 0.0;
      if (differential) {
        VehicleState v = probe(x, l);
        v.v_y = legal ? lateral_delta(lats[k]) * g.lane_width_m / ex.sim.kin.lane_change_duration_s : 0.0;
        value = p.w_hdr * r_hdr({lats[k], Longitudinal::Maintain}, v, p);
      } else {
        value = p.w_hdr * potential(probe(x, legal ? landing : l), p);
      }
      surf.grids[k][lane][xi] = value;
    }
  });
  return surf;
}

void write_grid_csv(std::ostream & os, const std::vector<double> & xs, const std::vector<std::vector<double>> & grid)
{
  os << "lane";
  for (double x : xs) os << ',' << format_double(x);
  os << '\n';
  for (std::size_t l = 0; l < grid.size(); ++l) {
    os << l;
    for (double v : grid[l]) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace hdr
