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

#include "hdr/config.hpp"

#include "hdr/trajectory_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace hdr
{

namespace
{
struct BadValue
{
  std::string what;
};

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view s)
{
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadValue{"expected a number"};
  return v;
}

template <class Int>
Int to_int(std::string_view s)
{
  Int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadValue{"expected an integer"};
  return v;
}

bool to_bool(std::string_view s)
{
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw BadValue{"expected true or false"};
}

RewardVariant to_variant(std::string_view s)
{
  auto v = parse_variant(s);
  if (!v) throw BadValue{"expected one of HDR, GNR, CTR, CTH"};
  return *v;
}

std::vector<std::string_view> split_list(std::string_view s)
{
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

struct Field
{
  std::string key;
  std::function<void(RunConfig &, std::string_view)> set;
  std::function<std::string(const RunConfig &)> get;
};

/// `ref` is a generic accessor usable on both const and mutable configs.
template <class Ref>
Field real(std::string key, Ref ref)
{
  return {
    std::move(key), [ref](RunConfig & c, std::string_view v) { ref(c) = to_double(v); },
    [ref](const RunConfig & c) { return format_double(ref(c)); }};
}

template <class Ref>
Field integer(std::string key, Ref ref)
{
  return {
    std::move(key), [ref](RunConfig & c, std::string_view v) { ref(c) = to_int<int>(v); },
    [ref](const RunConfig & c) { return std::to_string(ref(c)); }};
}

const std::vector<Field> & fields()
{
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // Road and timing.
    f.push_back(real("road_length", [](auto & c) -> auto & { return c.experiment.geometry.length_m; }));
    f.push_back(integer("lane_count", [](auto & c) -> auto & { return c.experiment.geometry.lane_count; }));
    f.push_back(real("lane_width", [](auto & c) -> auto & { return c.experiment.geometry.lane_width_m; }));
    f.push_back(real("dt", [](auto & c) -> auto & { return c.experiment.dt_s; }));
    // Vehicle kinematics.
    f.push_back(real("v_max", [](auto & c) -> auto & { return c.experiment.sim.kin.v_max_mps; }));
    f.push_back(real("a_max", [](auto & c) -> auto & { return c.experiment.sim.kin.a_max_mps2; }));
    f.push_back(real("action_accel", [](auto & c) -> auto & { return c.experiment.sim.kin.action_accel_mps2; }));
    f.push_back(
      real("lane_change_duration", [](auto & c) -> auto & { return c.experiment.sim.kin.lane_change_duration_s; }));
    f.push_back(real("vehicle_length", [](auto & c) -> auto & { return c.experiment.sim.kin.vehicle_length_m; }));
    // Human drivers.
    f.push_back(real("b_decel", [](auto & c) -> auto & { return c.experiment.sim.hdv.b_decel; }));
    f.push_back(real("t_react", [](auto & c) -> auto & { return c.experiment.sim.hdv.t_react; }));
    f.push_back(real("eps", [](auto & c) -> auto & { return c.experiment.sim.hdv.eps_imperfection; }));
    f.push_back(real("a_free", [](auto & c) -> auto & { return c.experiment.sim.hdv.a_free; }));
    f.push_back(real("lc_gain", [](auto & c) -> auto & { return c.experiment.sim.hdv.lc_gain; }));
    f.push_back(real("lc_politeness", [](auto & c) -> auto & { return c.experiment.sim.hdv.lc_politeness; }));
    f.push_back(real("sensing_radius", [](auto & c) -> auto & { return c.experiment.sim.sensing_radius_m; }));
    // Inflow.
    f.push_back(
      real("arrival_rate", [](auto & c) -> auto & { return c.experiment.sim.spawn.arrival_rate_per_lane; }));
    f.push_back(real("cav_fraction", [](auto & c) -> auto & { return c.experiment.sim.spawn.cav_fraction; }));
    f.push_back(real("v0_min", [](auto & c) -> auto & { return c.experiment.sim.spawn.v0_min; }));
    f.push_back(real("v0_max", [](auto & c) -> auto & { return c.experiment.sim.spawn.v0_max; }));
    f.push_back(real("min_spawn_gap", [](auto & c) -> auto & { return c.experiment.sim.spawn.min_spawn_gap_m; }));
    f.push_back(integer("spawn_max_cavs", [](auto & c) -> auto & { return c.experiment.sim.spawn.max_cavs; }));
    // Reward.
    f.push_back(real("gamma", [](auto & c) -> auto & { return c.experiment.reward.gamma; }));
    f.push_back(real("sigma", [](auto & c) -> auto & { return c.experiment.reward.sigma; }));
    f.push_back(real("zeta", [](auto & c) -> auto & { return c.experiment.reward.zeta; }));
    f.push_back(real("v_thres", [](auto & c) -> auto & { return c.experiment.reward.v_thres; }));
    f.push_back(real("ttc_crit", [](auto & c) -> auto & { return c.experiment.reward.ttc_crit; }));
    f.push_back(real("lambda_lc", [](auto & c) -> auto & { return c.experiment.reward.lambda_lc; }));
    f.push_back(real("w_trd", [](auto & c) -> auto & { return c.experiment.reward.w_trd; }));
    f.push_back(real("w_arg", [](auto & c) -> auto & { return c.experiment.reward.w_arg; }));
    f.push_back(real("w_hdr", [](auto & c) -> auto & { return c.experiment.reward.w_hdr; }));
    f.push_back(real("w_flow", [](auto & c) -> auto & { return c.experiment.reward.w_flow; }));
    f.push_back(real("w_safe", [](auto & c) -> auto & { return c.experiment.reward.w_safe; }));
    f.push_back(real("w_freq", [](auto & c) -> auto & { return c.experiment.reward.w_freq; }));
    f.push_back(real("x_goal", [](auto & c) -> auto & { return c.experiment.reward.x_goal_m; }));
    f.push_back(real("baseline_beta", [](auto & c) -> auto & { return c.experiment.reward.baseline_beta; }));
    f.push_back({"variant", [](RunConfig & c, std::string_view v) { c.variant = to_variant(v); },
                 [](const RunConfig & c) { return std::string(to_string(c.variant)); }});
    // Planner.
    f.push_back(integer("budget", [](auto & c) -> auto & { return c.experiment.search.budget; }));
    f.push_back(real("uct_c", [](auto & c) -> auto & { return c.experiment.search.uct_c; }));
    f.push_back(integer("rollout_horizon", [](auto & c) -> auto & { return c.experiment.search.rollout_horizon; }));
    f.push_back({"rollout_policy",
                 [](RunConfig & c, std::string_view v) {
                   auto p = parse_rollout_policy(v);
                   if (!p) throw BadValue{"expected uniform or greedy_arg"};
                   c.experiment.search.rollout_policy = *p;
                 },
                 [](const RunConfig & c) { return std::string(to_string(c.experiment.search.rollout_policy)); }});
    f.push_back({"uct_scaling",
                 [](RunConfig & c, std::string_view v) {
                   auto p = parse_uct_scaling(v);
                   if (!p) throw BadValue{"expected range or raw"};
                   c.experiment.search.uct_scaling = *p;
                 },
                 [](const RunConfig & c) { return std::string(to_string(c.experiment.search.uct_scaling)); }});
    f.push_back(integer("planner_max_cavs", [](auto & c) -> auto & { return c.experiment.search.max_cavs; }));
    // Scenario.
    f.push_back(integer("initial_cavs", [](auto & c) -> auto & { return c.experiment.scenario.initial_cavs; }));
    f.push_back(integer("initial_hdvs", [](auto & c) -> auto & { return c.experiment.scenario.initial_hdvs; }));
    f.push_back(real("slot_spacing", [](auto & c) -> auto & { return c.experiment.scenario.slot_spacing_m; }));
    f.push_back(integer("slots_per_lane", [](auto & c) -> auto & { return c.experiment.scenario.slots_per_lane; }));
    f.push_back(real("horizon", [](auto & c) -> auto & { return c.experiment.scenario.horizon_s; }));
    f.push_back({"stop_when_no_cavs",
                 [](RunConfig & c, std::string_view v) { c.experiment.scenario.stop_when_no_cavs = to_bool(v); },
                 [](const RunConfig & c) { return std::string(c.experiment.scenario.stop_when_no_cavs ? "true" : "false"); }});
    f.push_back({"controller",
                 [](RunConfig & c, std::string_view v) {
                   auto p = parse_controller(v);
                   if (!p) throw BadValue{"expected mcts or keep_lane"};
                   c.experiment.scenario.controller = *p;
                 },
                 [](const RunConfig & c) { return std::string(to_string(c.experiment.scenario.controller)); }});
    // Composite score.
    f.push_back(real("ats_w_velocity", [](auto & c) -> auto & { return c.experiment.ats.velocity; }));
    f.push_back(real("ats_w_ttc", [](auto & c) -> auto & { return c.experiment.ats.ttc; }));
    f.push_back(real("ats_w_success", [](auto & c) -> auto & { return c.experiment.ats.success; }));
    f.push_back(real("ats_w_collisions", [](auto & c) -> auto & { return c.experiment.ats.collisions; }));
    f.push_back(real("ats_w_jerk", [](auto & c) -> auto & { return c.experiment.ats.jerk; }));
    f.push_back(real("ats_velocity_anchor", [](auto & c) -> auto & { return c.experiment.ats.velocity_anchor; }));
    f.push_back(real("ats_ttc_anchor", [](auto & c) -> auto & { return c.experiment.ats.ttc_anchor; }));
    f.push_back(
      real("ats_collisions_anchor", [](auto & c) -> auto & { return c.experiment.ats.collisions_anchor; }));
    f.push_back(real("ats_jerk_anchor", [](auto & c) -> auto & { return c.experiment.ats.jerk_anchor; }));
    // Sweep and execution.
    f.push_back({"sweep_budgets",
                 [](RunConfig & c, std::string_view v) {
                   c.sweep_budgets.clear();
                   for (auto item : split_list(v)) c.sweep_budgets.push_back(to_int<int>(item));
                 },
                 [](const RunConfig & c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.sweep_budgets.size(); ++i) {
                     if (i) s += ',';
                     s += std::to_string(c.sweep_budgets[i]);
                   }
                   return s;
                 }});
    f.push_back({"sweep_variants",
                 [](RunConfig & c, std::string_view v) {
                   c.sweep_variants.clear();
                   for (auto item : split_list(v)) c.sweep_variants.push_back(to_variant(item));
                 },
                 [](const RunConfig & c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.sweep_variants.size(); ++i) {
                     if (i) s += ',';
                     s += to_string(c.sweep_variants[i]);
                   }
                   return s;
                 }});
    f.push_back({"execution",
                 [](RunConfig & c, std::string_view v) {
                   auto m = parse_execution_mode(v);
                   if (!m) throw BadValue{"expected serial or parallel"};
                   c.execution = *m;
                 },
                 [](const RunConfig & c) { return std::string(to_string(c.execution)); }});
    return f;
  }();
  return table;
}

/// Copies values shared between parameter blocks from their primary key.
void sync_shared(RunConfig & c, bool x_goal_set)
{
  auto & ex = c.experiment;
  ex.geometry = RoadGeometry::standard(ex.geometry.length_m, ex.geometry.lane_count, ex.geometry.lane_width_m);
  ex.sim.hdv.v_max = ex.sim.kin.v_max_mps;
  ex.reward.v_max = ex.sim.kin.v_max_mps;
  ex.reward.lane_width_m = ex.geometry.lane_width_m;
  ex.reward.vehicle_length_m = ex.sim.kin.vehicle_length_m;
  ex.search.discount = ex.reward.gamma;
  if (!x_goal_set) ex.reward.x_goal_m = ex.geometry.length_m;
}
}  // namespace

void RunConfig::validate() const
{
  experiment.validate();
  if (sweep_budgets.empty() || sweep_variants.empty()) {
    throw ContractViolation("sweep needs at least one budget and one variant");
  }
  for (std::size_t i = 0; i < sweep_budgets.size(); ++i) {
    if (sweep_budgets[i] < 1) throw ContractViolation("sweep budgets must be at least 1");
    if (i > 0 && sweep_budgets[i] <= sweep_budgets[i - 1]) {
      throw ContractViolation("sweep budgets must be strictly increasing");
    }
  }
}

RunConfig parse_config(std::string_view text, std::string_view origin)
{
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  const std::string where(origin);
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string at = where + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(at + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto & table = fields();
    const auto it =
      std::find_if(table.begin(), table.end(), [&](const Field & f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(at + "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) throw ConfigError(at + "duplicate key '" + std::string(key) + "'");
    try {
      it->set(cfg, value);
    } catch (const BadValue & e) {
      throw ConfigError(at + std::string(key) + ": " + e.what + ", got '" + std::string(value) + "'");
    }
  }
  sync_shared(cfg, seen.count("x_goal") > 0);
  try {
    cfg.validate();
  } catch (const ContractViolation & e) {
    throw ConfigError(where + ": invalid configuration: " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string & path)
{
  if (path.empty() || path == "default") {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigFileError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const RunConfig & cfg)
{
  std::string out;
  for (const auto & f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  for (const auto & f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace hdr
