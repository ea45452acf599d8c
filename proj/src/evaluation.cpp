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

#include "hdr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hdr
{

namespace
{
constexpr std::uint64_t kWorldStream = 1;
constexpr std::uint64_t kPlannerStream = 1000;

std::string opt(const std::optional<double> & v) { return v ? format_double(*v) : std::string(); }
}  // namespace

std::string_view to_string(Controller c) { return c == Controller::Mcts ? "mcts" : "keep_lane"; }

std::optional<Controller> parse_controller(std::string_view s)
{
  if (s == "mcts") return Controller::Mcts;
  if (s == "keep_lane") return Controller::KeepLane;
  return std::nullopt;
}

void ScenarioConfig::validate(const RoadGeometry & g) const
{
  if (initial_cavs < 0 || initial_hdvs < 0) {
    throw ContractViolation("initial vehicle counts must be non-negative");
  }
  if (slots_per_lane < 1 || !(slot_spacing_m > 0.0)) {
    throw ContractViolation("slot grid must be non-empty with positive spacing");
  }
  if (initial_cavs + initial_hdvs > slots_per_lane * g.lane_count) {
    throw ContractViolation("more initial vehicles than placement slots");
  }
  if ((slots_per_lane - 1) * slot_spacing_m >= g.length_m) {
    throw ContractViolation("placement slots extend past the road end");
  }
  if (!(horizon_s > 0.0)) throw ContractViolation("horizon must be positive");
}

void Experiment::validate() const
{
  geometry.validate();
  if (!(dt_s > 0.0)) throw ContractViolation("dt must be positive");
  sim.validate();
  reward.validate();
  search.validate();
  scenario.validate(geometry);
  ats.validate();
  if (std::abs(reward.lane_width_m - geometry.lane_width_m) > 1e-12) {
    throw ContractViolation("reward lane width must equal the road lane width");
  }
  if (scenario.initial_cavs > search.max_cavs) {
    throw ContractViolation("initial CAV count exceeds the planning cap");
  }
}

WorldState make_initial_world(const Experiment & ex, std::uint64_t seed)
{
  WorldState w;
  w.geometry = ex.geometry;
  w.dt_s = ex.dt_s;
  w.rng = Rng(mix_seed(seed, kWorldStream));

  const auto & sc = ex.scenario;
  const int lanes = ex.geometry.lane_count;
  std::vector<int> slots(static_cast<std::size_t>(lanes * sc.slots_per_lane));
  std::iota(slots.begin(), slots.end(), 0);
  for (std::size_t i = slots.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(w.rng.below(static_cast<int>(i)));
    std::swap(slots[i - 1], slots[j]);
  }
  const int n = sc.initial_cavs + sc.initial_hdvs;
  for (int k = 0; k < n; ++k) {
    const int slot = slots[static_cast<std::size_t>(k)];
    const int lane = slot % lanes;
    const double x = (slot / lanes) * sc.slot_spacing_m;
    const auto intention = static_cast<Intention>(w.rng.below(3));
    const double v0 = w.rng.uniform(ex.sim.spawn.v0_min, ex.sim.spawn.v0_max);
    insert_vehicle(w, k < sc.initial_cavs ? VehicleKind::Cav : VehicleKind::Hdv, x, lane, v0, intention);
  }
  w.validate(ex.sim.kin);
  return w;
}

EpisodeResult run_episode(const Experiment & ex, RewardVariant variant, std::uint64_t seed)
{
  ex.validate();
  EpisodeResult res;
  res.seed = seed;
  res.log.dt = ex.dt_s;

  WorldState world = make_initial_world(ex, seed);
  RewardStream stream{variant, 0.0, ex.reward.baseline_beta};
  const double horizon = ex.scenario.horizon_s;

  for (std::uint64_t k = 0; world.t_s < horizon - 1e-9; ++k) {
    if (ex.scenario.stop_when_no_cavs && k > 0 && world.cav_count() == 0) break;
    JointAction ja;
    if (world.cav_count() > 0) {
      if (ex.scenario.controller == Controller::Mcts) {
        SearchConfig sc = ex.search;
        sc.determinization_seed_base = mix_seed(seed, kPlannerStream + k);
        sc.time_limit_s = horizon;
        ja = plan(world, sc, ex.sim, ex.reward, stream);
      } else {
        for (const VehicleId id : world.cav_ids()) ja.emplace(id, DiscreteAction::keep());
      }
    }
    auto out = step(world, ja, ex.sim);
    const auto rb = total_reward(world, out, ja, ex.reward, stream);
    res.total_reward += rb.total;
    res.log.append_step(world, ja, out, rb);
    world = std::move(out.next_state);
  }
  res.metrics = compute_metrics(res.log, res.log.duration_s(), ex.ats);
  return res;
}

PolicyEvaluation evaluate_policy(
  const Experiment & ex, RewardVariant variant, const std::vector<std::uint64_t> & seeds,
  ExecutionMode mode, bool keep_logs)
{
  if (seeds.empty()) throw std::invalid_argument("evaluate_policy needs at least one episode");
  PolicyEvaluation ev;
  ev.variant = variant;
  ev.episodes.resize(seeds.size());
  for_each_index(static_cast<std::int64_t>(seeds.size()), mode, [&](std::int64_t i) {
    auto & slot = ev.episodes[static_cast<std::size_t>(i)];
    slot = run_episode(ex, variant, seeds[static_cast<std::size_t>(i)]);
    if (!keep_logs) slot.log = TrajectoryLog{};
  });
  std::vector<MetricsReport> reports;
  reports.reserve(ev.episodes.size());
  for (const auto & e : ev.episodes) reports.push_back(e.metrics);
  ev.aggregate = aggregate(reports);
  return ev;
}

std::vector<SweepRow> budget_sweep(
  const Experiment & ex, const std::vector<int> & budgets, const std::vector<RewardVariant> & variants,
  const std::vector<std::uint64_t> & seeds, ExecutionMode mode)
{
  if (budgets.empty() || variants.empty() || seeds.empty()) {
    throw std::invalid_argument("budget sweep needs budgets, variants and seeds");
  }
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw std::invalid_argument("budgets must be strictly increasing");
  }
  std::vector<SweepRow> rows;
  for (const auto v : variants) {
    for (const int b : budgets) {
      for (const auto s : seeds) rows.push_back({v, b, s, {}});
    }
  }
  // Largest budgets first so the dynamic schedule finishes evenly; results
  // are still written by cell index.
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a].budget > rows[b].budget;
  });
  for_each_index(static_cast<std::int64_t>(rows.size()), mode, [&](std::int64_t i) {
    auto & row = rows[order[static_cast<std::size_t>(i)]];
    Experiment cell = ex;
    cell.search.budget = row.budget;
    row.metrics = run_episode(cell, row.variant, row.seed).metrics;
  });
  return rows;
}

std::vector<SweepCell> summarize_sweep(const std::vector<SweepRow> & rows)
{
  std::vector<SweepCell> cells;
  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin;
    std::vector<MetricsReport> reports;
    while (end < rows.size() && rows[end].variant == rows[begin].variant &&
           rows[end].budget == rows[begin].budget) {
      reports.push_back(rows[end].metrics);
      ++end;
    }
    const auto agg = aggregate(reports);
    cells.push_back({rows[begin].variant, rows[begin].budget, agg.ats, agg.collisions_per_hour});
    begin = end;
  }
  return cells;
}

std::vector<double> sweep_ats(const std::vector<SweepRow> & rows, RewardVariant variant, int budget)
{
  std::vector<double> out;
  for (const auto & r : rows) {
    if (r.variant == variant && r.budget == budget) out.push_back(r.metrics.ats);
  }
  return out;
}

void write_sweep_csv(std::ostream & os, const std::vector<SweepRow> & rows)
{
  os << "variant,budget,seed,ats,inst_flow,avg_velocity,avg_min_ttc,collisions_per_hour,"
        "success_rate,avg_abs_jerk,avg_lc_interval,exits,collisions,duration_s\n";
  for (const auto & r : rows) {
    const auto & m = r.metrics;
    os << to_string(r.variant) << ',' << r.budget << ',' << r.seed << ',' << format_double(m.ats) << ','
       << format_double(m.inst_flow) << ',' << format_double(m.avg_velocity) << ','
       << format_double(m.avg_min_ttc) << ',' << format_double(m.collisions_per_hour) << ','
       << opt(m.success_rate) << ',' << format_double(m.avg_abs_jerk) << ',' << opt(m.avg_lc_interval)
       << ',' << m.exits << ',' << m.collisions << ',' << format_double(m.duration_s) << '\n';
  }
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int n)
{
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

}  // namespace hdr
