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

#include "hdr/mcts.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace hdr
{

namespace
{
constexpr std::uint64_t kRolloutStream = 0x52A7F0C1D3E4B596ULL;

struct Edge
{
  int node;
  int action;
  int step;
};

int select_action(const SearchNode & n, double c, double lo, double span)
{
  for (int a = 0; a < DiscreteAction::kCount; ++a) {
    if (n.action_visits[static_cast<std::size_t>(a)] == 0) return a;
  }
  const double log_n = std::log(static_cast<double>(n.visits));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < DiscreteAction::kCount; ++a) {
    const auto ai = static_cast<std::size_t>(a);
    const double visits = n.action_visits[ai];
    const double q = (n.value_sums[ai] / visits - lo) / span;
    const double score = q + c * std::sqrt(log_n / visits);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

DiscreteAction rollout_action(
  const VehicleState & v, RolloutPolicy policy, Rng & rng, const RewardParams & params)
{
  if (policy == RolloutPolicy::UniformRandom) {
    return DiscreteAction::from_index(rng.below(DiscreteAction::kCount));
  }
  const auto lat = static_cast<Lateral>(rng.below(3));
  return {lat, v.v_x >= params.v_thres ? Longitudinal::Maintain : Longitudinal::Accelerate};
}

void mix(std::uint64_t & h, std::uint64_t word)
{
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xFFU;
    h *= 0x100000001B3ULL;
  }
}
}  // namespace

std::string_view to_string(RolloutPolicy p)
{
  return p == RolloutPolicy::UniformRandom ? "uniform" : "greedy_arg";
}

std::string_view to_string(UctScaling s)
{
  return s == UctScaling::Range ? "range" : "raw";
}

std::optional<UctScaling> parse_uct_scaling(std::string_view s)
{
  if (s == "range") return UctScaling::Range;
  if (s == "raw") return UctScaling::Raw;
  return std::nullopt;
}

std::optional<RolloutPolicy> parse_rollout_policy(std::string_view s)
{
  if (s == "uniform") return RolloutPolicy::UniformRandom;
  if (s == "greedy_arg") return RolloutPolicy::GreedyArg;
  return std::nullopt;
}

void SearchConfig::validate() const
{
  if (budget < 1) throw ContractViolation("search budget must be at least 1");
  if (rollout_horizon < 1) throw ContractViolation("rollout horizon must be at least 1");
  if (!(discount > 0.0 && discount <= 1.0)) throw ContractViolation("discount must lie in (0, 1]");
  if (!(uct_c >= 0.0)) throw ContractViolation("exploration constant must be non-negative");
  if (max_cavs < 1) throw ContractViolation("max_cavs must be at least 1");
}

std::uint64_t world_digest(const WorldState & world)
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  mix(h, std::bit_cast<std::uint64_t>(world.t_s));
  for (const auto & v : world.vehicles) {
    mix(h, v.id);
    mix(h, static_cast<std::uint64_t>(v.lane));
    mix(h, std::bit_cast<std::uint64_t>(v.x_m));
    mix(h, std::bit_cast<std::uint64_t>(v.v_x));
  }
  return h;
}

PlanResult plan_with_tree(
  const WorldState & world, const SearchConfig & cfg, const SimConfig & sim, const RewardParams & params,
  const RewardStream & stream)
{
  cfg.validate();
  const auto root_cavs = world.cav_ids();
  if (root_cavs.empty()) {
    throw ContractViolation("plan: world has no CAVs");
  }
  if (root_cavs.size() > static_cast<std::size_t>(cfg.max_cavs)) {
    throw ContractViolation("plan: " + std::to_string(root_cavs.size()) + " CAVs exceed the planning cap");
  }

  PlanResult result;
  SearchTree & tree = result.tree;
  tree.nodes.reserve(static_cast<std::size_t>(cfg.budget) + 1);
  SearchNode root;
  root.agent = root_cavs.front();
  root.state_digest = world_digest(world);
  tree.nodes.push_back(root);

  std::vector<Edge> path;
  std::vector<double> rewards;
  std::vector<double> returns;

  for (int sim_index = 0; sim_index < cfg.budget; ++sim_index) {
    const auto idx = static_cast<std::uint64_t>(sim_index);
    WorldState w = world;
    w.rng = Rng(mix_seed(cfg.determinization_seed_base, idx));
    Rng rollout_rng(mix_seed(cfg.determinization_seed_base ^ kRolloutStream, idx));
    RewardStream rs = stream;
    path.clear();
    rewards.clear();

    int node = 0;
    int pending = -1;
    bool in_tree = true;
    int stop_step = std::numeric_limits<int>::max();

    for (int k = 0;; ++k) {
      const auto cavs = w.cav_ids();
      if (pending >= 0) {
        auto & p = tree.nodes[static_cast<std::size_t>(pending)];
        p.agent = cavs.empty() ? kNoAgent : cavs.front();
        p.step = k;
        p.state_digest = world_digest(w);
        pending = -1;
      }
      if (!in_tree && k >= stop_step) break;
      if (k > 0 && w.t_s >= cfg.time_limit_s - 1e-9) break;
      if (in_tree && cavs.empty()) {
        in_tree = false;
        stop_step = k + cfg.rollout_horizon;
      }

      JointAction ja;
      for (const VehicleId id : cavs) {
        if (pending >= 0) {
          auto & p = tree.nodes[static_cast<std::size_t>(pending)];
          p.agent = id;
          p.step = k;
          p.state_digest = world_digest(w);
          pending = -1;
        }
        DiscreteAction a;
        if (in_tree && tree.nodes[static_cast<std::size_t>(node)].agent == id) {
          auto & nd = tree.nodes[static_cast<std::size_t>(node)];
          const bool ranged = cfg.uct_scaling == UctScaling::Range && tree.max_return > tree.min_return;
          const int ai = select_action(
            nd, cfg.uct_c, ranged ? tree.min_return : 0.0, ranged ? tree.max_return - tree.min_return : 1.0);
          const auto au = static_cast<std::size_t>(ai);
          const bool expand = nd.action_visits[au] == 0;
          ++nd.visits;
          ++nd.action_visits[au];
          path.push_back({node, ai, k});
          if (expand) {
            const auto child = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes[static_cast<std::size_t>(node)].children[au] = child;
            tree.nodes.emplace_back();
            pending = child;
            in_tree = false;
            stop_step = k + cfg.rollout_horizon;
          } else {
            node = nd.children[au];
          }
          a = DiscreteAction::from_index(ai);
        } else {
          if (in_tree) {
            // The determinised future diverged from the node's CAV set.
            in_tree = false;
            stop_step = k + cfg.rollout_horizon;
          }
          const auto * v = w.find(id);
          a = rollout_action(*v, cfg.rollout_policy, rollout_rng, params);
        }
        ja.emplace(id, a);
      }

      auto out = step(w, ja, sim);
      const auto rb = total_reward(w, out, ja, params, rs);
      rewards.push_back(rb.total);
      w = std::move(out.next_state);
    }

    returns.assign(rewards.size() + 1, 0.0);
    for (std::size_t k = rewards.size(); k-- > 0;) {
      returns[k] = rewards[k] + cfg.discount * returns[k + 1];
    }
    for (const auto & e : path) {
      const double g = returns[static_cast<std::size_t>(e.step)];
      tree.nodes[static_cast<std::size_t>(e.node)].value_sums[static_cast<std::size_t>(e.action)] += g;
      tree.min_return = std::min(tree.min_return, g);
      tree.max_return = std::max(tree.max_return, g);
    }
    tree.max_depth_steps = std::max(tree.max_depth_steps, static_cast<int>(rewards.size()));
    ++tree.simulations;
  }

  // Robust child per CAV level of the first step; unexplored levels keep lane and speed.
  int node = 0;
  for (const VehicleId id : root_cavs) {
    DiscreteAction a = DiscreteAction::keep();
    if (node >= 0) {
      const auto & nd = tree.nodes[static_cast<std::size_t>(node)];
      if (nd.agent == id && nd.visits > 1) {
        int best = 0;
        for (int i = 1; i < DiscreteAction::kCount; ++i) {
          if (nd.action_visits[static_cast<std::size_t>(i)] > nd.action_visits[static_cast<std::size_t>(best)]) {
            best = i;
          }
        }
        a = DiscreteAction::from_index(best);
        node = nd.children[static_cast<std::size_t>(best)];
      } else {
        node = -1;
      }
    }
    result.action.emplace(id, a);
  }
  return result;
}

JointAction plan(
  const WorldState & world, const SearchConfig & cfg, const SimConfig & sim, const RewardParams & params,
  const RewardStream & stream)
{
  return plan_with_tree(world, cfg, sim, params, stream).action;
}

}  // namespace hdr
