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

#include "hdr/traffic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hdr
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_ahead(const VehicleState & self, const VehicleState & other)
{
  return other.x_m > self.x_m || (other.x_m == self.x_m && other.id > self.id);
}

LaneNeighbors lane_neighbors(const WorldState & world, const VehicleState & self, int lane)
{
  LaneNeighbors nb;
  if (!world.geometry.valid_lane(lane)) {
    return nb;
  }
  for (const auto & o : world.vehicles) {
    if (o.id == self.id || !o.occupies(lane)) {
      continue;
    }
    if (is_ahead(self, o)) {
      if (!nb.leader || o.x_m < nb.leader->x_m) nb.leader = &o;
    } else {
      if (!nb.follower || o.x_m > nb.follower->x_m) nb.follower = &o;
    }
  }
  return nb;
}

double free_speed(
  const VehicleState & self, const VehicleState * leader, const HdvParams & p, double dt,
  const KinematicsParams & kin)
{
  return hdv_follow_speed_with_draw(self, leader, p, dt, 0.0, kin);
}

bool safe_to_enter(
  const VehicleState & self, const LaneNeighbors & nb, const HdvParams & p, double dt,
  const KinematicsParams & kin)
{
  if (nb.leader) {
    const double g = gap_between(self, *nb.leader, kin);
    if (!(g > self.v_x * p.t_react) || g <= 0.0) {
      return false;
    }
  }
  if (nb.follower) {
    const double g = gap_between(*nb.follower, self, kin);
    if (!(g > nb.follower->v_x * p.t_react) || g <= 0.0) {
      return false;
    }
    const double v_safe = krauss_safe_speed(nb.follower->v_x, self.v_x, g, p);
    if (v_safe < nb.follower->v_x - p.lc_politeness * p.b_decel * dt) {
      return false;
    }
  }
  return true;
}
}  // namespace

void HdvParams::validate() const
{
  if (!(b_decel > 0 && t_react > 0 && v_max > 0 && a_free > 0 && lc_gain >= 0 && lc_politeness > 0)) {
    throw ContractViolation("HDV parameters must be positive");
  }
  if (!(eps_imperfection >= 0.0 && eps_imperfection <= 1.0)) {
    throw ContractViolation("HDV imperfection eps must lie in [0, 1]");
  }
}

void SpawnConfig::validate(double v_max) const
{
  if (!(arrival_rate_per_lane >= 0.0)) {
    throw ContractViolation("arrival rate must be non-negative");
  }
  if (!(cav_fraction >= 0.0 && cav_fraction <= 1.0)) {
    throw ContractViolation("cav_fraction must lie in [0, 1]");
  }
  if (!(v0_min >= 0.0 && v0_min <= v0_max && v0_max <= v_max)) {
    throw ContractViolation("initial speed range must lie within [0, v_max]");
  }
  if (!(min_spawn_gap_m >= 0.0) || max_cavs < 0) {
    throw ContractViolation("spawn gap and CAV cap must be non-negative");
  }
}

void SimConfig::validate() const
{
  hdv.validate();
  spawn.validate(kin.v_max_mps);
  if (!(kin.action_accel_mps2 > 0 && kin.action_accel_mps2 <= kin.a_max_mps2)) {
    throw ContractViolation("action acceleration must lie in (0, a_max]");
  }
  if (!(kin.lane_change_duration_s > 0 && kin.vehicle_length_m > 0 && kin.v_max_mps > 0)) {
    throw ContractViolation("kinematic parameters must be positive");
  }
  if (!(sensing_radius_m > 0)) {
    throw ContractViolation("sensing radius must be positive");
  }
}

bool StepOutcome::collided_this_step(VehicleId id) const
{
  return std::any_of(collided.begin(), collided.end(), [id](const auto & c) { return c.first == id; });
}

Neighborhood neighbors_of(const WorldState & world, const VehicleState & self)
{
  Neighborhood nb;
  nb.left = lane_neighbors(world, self, self.lane + 1);
  nb.current = lane_neighbors(world, self, self.lane);
  nb.right = lane_neighbors(world, self, self.lane - 1);
  return nb;
}

const VehicleState * leader_in_lanes(
  const WorldState & world, const VehicleState & self, int lane_a, int lane_b)
{
  const VehicleState * best = nullptr;
  for (const auto & o : world.vehicles) {
    if (o.id == self.id || !(o.occupies(lane_a) || o.occupies(lane_b)) || !is_ahead(self, o)) {
      continue;
    }
    if (!best || o.x_m < best->x_m) best = &o;
  }
  return best;
}

const VehicleState * same_lane_leader(const WorldState & world, const VehicleState & self)
{
  const VehicleState * best = nullptr;
  for (const auto & o : world.vehicles) {
    if (o.id == self.id || o.lane != self.lane || !is_ahead(self, o)) {
      continue;
    }
    if (!best || o.x_m < best->x_m) best = &o;
  }
  return best;
}

double gap_between(const VehicleState & rear, const VehicleState & front, const KinematicsParams & kin)
{
  return front.x_m - rear.x_m - kin.vehicle_length_m;
}

double krauss_safe_speed(double v_self, double v_leader, double gap, const HdvParams & p)
{
  return v_leader + (gap - v_leader * p.t_react) / (v_self / p.b_decel + p.t_react);
}

double hdv_follow_speed_with_draw(
  const VehicleState & self, const VehicleState * leader, const HdvParams & p, double dt, double u,
  const KinematicsParams & kin)
{
  const double v_safe =
    leader ? krauss_safe_speed(self.v_x, leader->v_x, gap_between(self, *leader, kin), p) : kInf;
  const double v_des = std::min({self.v_x + p.a_free * dt, p.v_max, v_safe});
  return std::max(0.0, v_des - p.eps_imperfection * p.a_free * dt * u);
}

double hdv_follow_speed(
  const VehicleState & self, const VehicleState * leader, const HdvParams & p, double dt, Rng & rng,
  const KinematicsParams & kin)
{
  return hdv_follow_speed_with_draw(self, leader, p, dt, rng.uniform(), kin);
}

Lateral hdv_lane_change_decision(
  const VehicleState & self, const Neighborhood & nb, const RoadGeometry & geometry,
  const HdvParams & p, double dt, const KinematicsParams & kin)
{
  if (self.lane_change) {
    return Lateral::Keep;
  }

  // Strategic: leave a lane that does not serve the intention.
  if (!geometry.permits(self.lane, self.intention)) {
    const bool go_left = self.target_lane > self.lane;
    const LaneNeighbors & side = go_left ? nb.left : nb.right;
    if (safe_to_enter(self, side, p, dt, kin)) {
      return go_left ? Lateral::ChangeLeft : Lateral::ChangeRight;
    }
    return Lateral::Keep;
  }

  // Tactical: move for a clearly faster lane that still serves the intention.
  Lateral best = Lateral::Keep;
  double best_speed = free_speed(self, nb.current.leader, p, dt, kin) + p.lc_gain;
  const auto consider = [&](int lane, const LaneNeighbors & side, Lateral action) {
    if (!geometry.permits(lane, self.intention)) {
      return;
    }
    const double s = free_speed(self, side.leader, p, dt, kin);
    if (s > best_speed && safe_to_enter(self, side, p, dt, kin)) {
      best = action;
      best_speed = s;
    }
  };
  consider(self.lane + 1, nb.left, Lateral::ChangeLeft);
  consider(self.lane - 1, nb.right, Lateral::ChangeRight);
  return best;
}

VehicleState & insert_vehicle(
  WorldState & world, VehicleKind kind, double x_m, int lane, double v_x, Intention intention)
{
  VehicleState v;
  v.id = world.next_id++;
  v.kind = kind;
  v.x_m = x_m;
  v.lane = lane;
  v.y_m = lane * world.geometry.lane_width_m;
  v.v_x = v_x;
  v.intention = intention;
  v.target_lane = target_lane_for(intention, lane, world.geometry);
  auto it = std::lower_bound(
    world.vehicles.begin(), world.vehicles.end(), v.id,
    [](const VehicleState & a, VehicleId key) { return a.id < key; });
  return *world.vehicles.insert(it, v);
}

StepOutcome step(const WorldState & world, const JointAction & cav_actions, const SimConfig & cfg)
{
  const auto & g = world.geometry;
  const auto & kin = cfg.kin;
  const auto & hdv = cfg.hdv;
  const double dt = world.dt_s;

  {
    auto it = cav_actions.begin();
    for (const auto & v : world.vehicles) {
      if (!v.is_cav()) continue;
      if (it == cav_actions.end() || it->first != v.id) {
        throw ContractViolation("joint action is missing CAV " + std::to_string(v.id));
      }
      ++it;
    }
    if (it != cav_actions.end()) {
      throw ContractViolation("joint action names unknown vehicle " + std::to_string(it->first));
    }
  }

  StepOutcome out;
  out.next_state.t_s = world.t_s;
  out.next_state.dt_s = dt;
  out.next_state.geometry = g;
  out.next_state.rng = world.rng;
  out.next_state.next_id = world.next_id;
  WorldState & next = out.next_state;

  const std::size_t n = world.vehicles.size();

  // (1) HDV lane-change decisions on the pre-step state.
  std::vector<Lateral> decision(n, Lateral::Keep);
  for (std::size_t i = 0; i < n; ++i) {
    const auto & v = world.vehicles[i];
    if (!v.is_cav()) {
      decision[i] = hdv_lane_change_decision(v, neighbors_of(world, v), g, hdv, dt, kin);
      out.hdv_decisions.emplace_back(v.id, decision[i]);
    }
  }

  // (2) HDV speeds. The leader search covers every lane the vehicle will touch.
  std::vector<double> hdv_speed(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto & v = world.vehicles[i];
    if (v.is_cav()) continue;
    int other = v.lane;
    if (v.lane_change) {
      other = v.lane_change->target_lane;
    } else if (decision[i] == Lateral::ChangeLeft) {
      other = v.lane + 1;
    } else if (decision[i] == Lateral::ChangeRight) {
      other = v.lane - 1;
    }
    const VehicleState * leader = leader_in_lanes(world, v, v.lane, other);
    hdv_speed[i] = hdv_follow_speed(v, leader, hdv, dt, next.rng, kin);
  }

  // (3)+(4) CAV kinematics and HDV position updates.
  std::vector<VehicleState> moved;
  moved.reserve(n);
  {
    auto act = cav_actions.begin();
    for (std::size_t i = 0; i < n; ++i) {
      const auto & v = world.vehicles[i];
      if (v.is_cav()) {
        moved.push_back(apply_action_kinematics(v, act->second, dt, g, kin));
        ++act;
      } else {
        VehicleState s = v;
        // Krauss uses the Euler position update, which keeps v_safe collision-free.
        s.a_x = (hdv_speed[i] - v.v_x) / dt;
        s.v_x = hdv_speed[i];
        s.x_m += s.v_x * dt;
        advance_lateral(s, decision[i], dt, g, kin);
        moved.push_back(s);
      }
    }
  }

  // (5) Collisions.
  std::vector<char> removed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto & a = moved[i];
      const auto & b = moved[j];
      if (std::abs(a.x_m - b.x_m) >= kin.vehicle_length_m) continue;
      if (a.lane == b.lane || std::abs(a.y_m - b.y_m) < 0.5 * g.lane_width_m) {
        out.collisions.emplace_back(a.id, b.id);
        removed[i] = 1;
        removed[j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) out.collided.emplace_back(moved[i].id, moved[i].kind);
  }

  // (6) Exits.
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    const auto & v = moved[i];
    if (v.x_m >= g.length_m) {
      out.despawned.push_back({v.id, v.kind, g.permits(v.lane, v.intention)});
      removed[i] = 1;
    }
  }
  next.vehicles.reserve(n + static_cast<std::size_t>(g.lane_count));
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) next.vehicles.push_back(moved[i]);
  }

  // (7) Poisson arrivals, at most one per lane per step.
  const auto & sp = cfg.spawn;
  if (sp.arrival_rate_per_lane > 0.0) {
    const double p_arrive = 1.0 - std::exp(-sp.arrival_rate_per_lane * dt);
    for (int lane = 0; lane < g.lane_count; ++lane) {
      if (!next.rng.bernoulli(p_arrive)) continue;
      const double u_kind = next.rng.uniform();
      const auto intention = static_cast<Intention>(next.rng.below(3));
      const double v0 = next.rng.uniform(sp.v0_min, sp.v0_max);

      const VehicleState * first = nullptr;
      for (const auto & o : next.vehicles) {
        if (o.occupies(lane) && (!first || o.x_m < first->x_m)) first = &o;
      }
      if (first) {
        if (first->x_m < sp.min_spawn_gap_m) continue;
        const double gap = first->x_m - kin.vehicle_length_m;
        if (krauss_safe_speed(v0, first->v_x, gap, hdv) < v0) continue;
      }
      const bool cav = u_kind < sp.cav_fraction &&
                       next.cav_count() < static_cast<std::size_t>(sp.max_cavs);
      const auto & v =
        insert_vehicle(next, cav ? VehicleKind::Cav : VehicleKind::Hdv, 0.0, lane, v0, intention);
      out.spawned.push_back(v.id);
    }
  }

  next.t_s = world.t_s + dt;
  return out;
}

Observation observe(const WorldState & world, VehicleId id, double radius_m)
{
  const VehicleState * self = world.find(id);
  if (!self) {
    throw ContractViolation("observe: unknown vehicle " + std::to_string(id));
  }
  Observation obs;
  obs.self = *self;
  for (const auto & o : world.vehicles) {
    if (o.id == id) continue;
    const double dx = o.x_m - self->x_m;
    const double dy = o.y_m - self->y_m;
    if (std::hypot(dx, dy) <= radius_m) {
      VehicleState rel = o;
      rel.x_m = dx;
      rel.y_m = dy;
      obs.neighbors.push_back(rel);
    }
  }
  return obs;
}

}  // namespace hdr
