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
#include "hdr/evaluation.hpp"
#include "hdr/mcts.hpp"
#include "hdr/metrics.hpp"
#include "hdr/snr_diagnostic.hpp"
#include "hdr/tabular_mdp.hpp"
#include "hdr/trajectory_log.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace
{

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kMissingFile = 2,
  kBadConfig = 3,
  kUsage = 4,
  kContract = 5,
};

/// Thrown for unreadable input paths other than the config file.
struct MissingInput : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct Globals
{
  std::string config{"default"};
  std::uint64_t seed{1};
  std::string out{"out"};
  int episodes{1};
};

void write_file(const fs::path & path, const std::string & content)
{
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << content;
}

template <class F>
void write_with(const fs::path & path, F && fill)
{
  std::ostringstream ss;
  fill(ss);
  write_file(path, ss.str());
}

json opt_json(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const hdr::MetricsReport & m)
{
  json j;
  j["inst_flow_veh_per_h"] = m.inst_flow;
  j["avg_velocity_mps"] = m.avg_velocity;
  j["avg_min_ttc_s"] = m.avg_min_ttc;
  j["ttc_cap_s"] = hdr::kTtcCap;
  j["collisions_per_hour"] = m.collisions_per_hour;
  j["success_rate"] = opt_json(m.success_rate);
  j["avg_abs_jerk_mps3"] = m.avg_abs_jerk;
  j["avg_lc_interval_s"] = opt_json(m.avg_lc_interval);
  j["ats"] = m.ats;
  j["exits"] = m.exits;
  j["collisions"] = m.collisions;
  j["cav_finished"] = m.cav_finished;
  j["cav_succeeded"] = m.cav_succeeded;
  j["duration_s"] = m.duration_s;
  return j;
}

json summary_json(const hdr::MetricSummary & s) { return json{{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

json aggregate_json(const hdr::AggregateReport & a)
{
  json j;
  j["inst_flow_veh_per_h"] = summary_json(a.inst_flow);
  j["avg_velocity_mps"] = summary_json(a.avg_velocity);
  j["avg_min_ttc_s"] = summary_json(a.avg_min_ttc);
  j["collisions_per_hour"] = summary_json(a.collisions_per_hour);
  j["success_rate"] = summary_json(a.success_rate);
  j["avg_abs_jerk_mps3"] = summary_json(a.avg_abs_jerk);
  j["avg_lc_interval_s"] = summary_json(a.avg_lc_interval);
  j["ats"] = summary_json(a.ats);
  return j;
}

std::string seeds_manifest(const std::vector<std::uint64_t> & seeds)
{
  std::string s = "# episode seeds; world stream = mix(seed, 1), planner stream = mix(seed, 1000 + step)\n";
  for (auto x : seeds) s += std::to_string(x) + "\n";
  return s;
}

void write_provenance(const fs::path & dir, const hdr::RunConfig & cfg, const std::vector<std::uint64_t> & seeds)
{
  write_file(dir / "config.resolved", hdr::emit_config(cfg));
  write_file(dir / "seeds.txt", seeds_manifest(seeds));
}

int cmd_simulate(const Globals & g, const hdr::RunConfig & cfg)
{
  const auto seeds = hdr::seed_range(g.seed, g.episodes);
  const auto ev = hdr::evaluate_policy(cfg.experiment, cfg.variant, seeds, cfg.execution, true);
  const fs::path out(g.out);
  write_provenance(out, cfg, seeds);
  json all;
  all["variant"] = std::string(hdr::to_string(cfg.variant));
  all["episodes"] = json::array();
  for (const auto & e : ev.episodes) {
    const fs::path dir = out / ("seed_" + std::to_string(e.seed));
    write_provenance(dir, cfg, {e.seed});
    write_with(dir / "steps.csv", [&](std::ostream & os) { hdr::write_steps_csv(os, e.log); });
    write_with(dir / "events.csv", [&](std::ostream & os) { hdr::write_events_csv(os, e.log); });
    json m = metrics_json(e.metrics);
    m["seed"] = e.seed;
    m["total_reward"] = e.total_reward;
    write_file(dir / "metrics.json", m.dump(2) + "\n");
    all["episodes"].push_back(m);
  }
  all["aggregate"] = aggregate_json(ev.aggregate);
  write_file(out / "metrics.json", all.dump(2) + "\n");
  write_with(out / "summary.csv", [&](std::ostream & os) {
    os << "seed,ats,inst_flow,avg_velocity,avg_min_ttc,collisions_per_hour,success_rate,avg_abs_jerk\n";
    for (const auto & e : ev.episodes) {
      const auto & m = e.metrics;
      os << e.seed << ',' << hdr::format_double(m.ats) << ',' << hdr::format_double(m.inst_flow) << ','
         << hdr::format_double(m.avg_velocity) << ',' << hdr::format_double(m.avg_min_ttc) << ','
         << hdr::format_double(m.collisions_per_hour) << ','
         << (m.success_rate ? hdr::format_double(*m.success_rate) : std::string()) << ','
         << hdr::format_double(m.avg_abs_jerk) << '\n';
    }
  });
  std::printf(
    "simulate %s: %d episode(s), mean ATS %.4f, collisions/h %.2f -> %s\n", std::string(hdr::to_string(cfg.variant)).c_str(),
    g.episodes, ev.aggregate.ats.mean, ev.aggregate.collisions_per_hour.mean, out.string().c_str());
  return kOk;
}

int cmd_plan(const Globals & g, const hdr::RunConfig & cfg)
{
  const auto & ex = cfg.experiment;
  const auto world = hdr::make_initial_world(ex, g.seed);
  auto sc = ex.search;
  sc.determinization_seed_base = hdr::mix_seed(g.seed, 1000);
  sc.time_limit_s = ex.scenario.horizon_s;
  const hdr::RewardStream stream{cfg.variant, 0.0, ex.reward.baseline_beta};
  const auto res = hdr::plan_with_tree(world, sc, ex.sim, ex.reward, stream);

  json j;
  j["variant"] = std::string(hdr::to_string(cfg.variant));
  j["budget"] = sc.budget;
  j["simulations"] = res.tree.simulations;
  j["min_return"] = res.tree.min_return;
  j["max_return"] = res.tree.max_return;
  j["max_depth_steps"] = res.tree.max_depth_steps;
  j["action"] = json::array();
  for (const auto & [id, a] : res.action) {
    j["action"].push_back(
      {{"id", id}, {"lateral", hdr::to_string(a.lateral)}, {"longitudinal", hdr::to_string(a.longitudinal)}});
  }
  j["nodes"] = json::array();
  for (std::size_t i = 0; i < res.tree.nodes.size(); ++i) {
    const auto & n = res.tree.nodes[i];
    json node{{"index", i}, {"agent", n.agent}, {"step", n.step}, {"visits", n.visits}};
    json edges = json::array();
    for (int a = 0; a < hdr::DiscreteAction::kCount; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      if (n.action_visits[ai] == 0) continue;
      edges.push_back(
        {{"action", a}, {"visits", n.action_visits[ai]}, {"q", n.value_sums[ai] / n.action_visits[ai]},
         {"child", n.children[ai]}});
    }
    node["edges"] = std::move(edges);
    j["nodes"].push_back(std::move(node));
  }
  const fs::path out(g.out);
  write_provenance(out, cfg, {g.seed});
  write_file(out / "tree.json", j.dump(2) + "\n");
  for (const auto & [id, a] : res.action) {
    std::printf(
      "CAV %u: %s %s\n", id, std::string(hdr::to_string(a.lateral)).c_str(),
      std::string(hdr::to_string(a.longitudinal)).c_str());
  }
  std::printf("%zu nodes -> %s\n", res.tree.nodes.size(), (out / "tree.json").string().c_str());
  return kOk;
}

int cmd_sweep(const Globals & g, hdr::RunConfig cfg, const std::vector<int> & budgets, const std::vector<std::string> & variants)
{
  if (!budgets.empty()) cfg.sweep_budgets = budgets;
  if (!variants.empty()) {
    cfg.sweep_variants.clear();
    for (const auto & v : variants) {
      auto p = hdr::parse_variant(v);
      if (!p) throw hdr::ConfigError("unknown variant '" + v + "'");
      cfg.sweep_variants.push_back(*p);
    }
  }
  cfg.validate();
  const auto seeds = hdr::seed_range(g.seed, g.episodes);
  const auto rows = hdr::budget_sweep(cfg.experiment, cfg.sweep_budgets, cfg.sweep_variants, seeds, cfg.execution);
  const fs::path out(g.out);
  write_provenance(out, cfg, seeds);
  write_with(out / "sweep.csv", [&](std::ostream & os) { hdr::write_sweep_csv(os, rows); });
  const auto cells = hdr::summarize_sweep(rows);
  write_with(out / "sweep_summary.csv", [&](std::ostream & os) {
    os << "variant,budget,episodes,ats_mean,ats_std,collisions_per_hour_mean\n";
    for (const auto & c : cells) {
      os << hdr::to_string(c.variant) << ',' << c.budget << ',' << c.ats.n << ',' << hdr::format_double(c.ats.mean)
         << ',' << hdr::format_double(c.ats.std) << ',' << hdr::format_double(c.collisions_per_hour.mean) << '\n';
    }
  });
  std::printf("%-8s %8s %10s %10s\n", "variant", "budget", "ATS", "coll/h");
  for (const auto & c : cells) {
    std::printf(
      "%-8s %8d %10.4f %10.2f\n", std::string(hdr::to_string(c.variant)).c_str(), c.budget, c.ats.mean,
      c.collisions_per_hour.mean);
  }
  return kOk;
}

int cmd_oracle(const Globals & g, const hdr::RunConfig & cfg)
{
  struct Row
  {
    std::string check;
    bool pass;
    std::string detail;
  };
  std::vector<Row> rows;
  char buf[160];

  hdr::BatchSpec spec;
  spec.seed = g.seed;
  const auto batch = hdr::verify_random_batch(spec, cfg.execution);
  double worst = 0.0;
  int equal = 0;
  for (const auto & r : batch) {
    worst = std::max(worst, r.max_shift_error);
    equal += r.policy_sets_equal ? 1 : 0;
  }
  std::snprintf(buf, sizeof(buf), "%d/%d policy sets equal, max |Q'-(Q-phi)| = %.3e", equal, spec.instances, worst);
  rows.push_back({"trd_invariance_random", equal == spec.instances && worst < 1e-8, buf});

  hdr::Rng rng(hdr::mix_seed(g.seed, 99));
  const auto m = hdr::random_mdp(spec.n_states, spec.n_actions, spec.gamma, rng);
  const auto zero = hdr::verify_invariance(m, hdr::PotentialVector(static_cast<std::size_t>(spec.n_states), 0.0), spec.tol);
  std::snprintf(buf, sizeof(buf), "deviation %.3e", zero.max_shift_error);
  rows.push_back({"zero_potential", zero.policy_sets_equal && zero.max_shift_error == 0.0, buf});

  const auto constant =
    hdr::verify_invariance(m, hdr::PotentialVector(static_cast<std::size_t>(spec.n_states), 0.7), spec.tol);
  std::snprintf(buf, sizeof(buf), "deviation %.3e", constant.max_shift_error);
  rows.push_back({"constant_potential", constant.policy_sets_equal && constant.max_shift_error < 1e-8, buf});

  const auto chain = hdr::three_state_chain();
  const auto adv = hdr::find_policy_changing_bonus(chain, g.seed);
  std::snprintf(
    buf, sizeof(buf), "found after %d tries, %d state(s) changed", adv.tries, adv.report.mismatched_states);
  rows.push_back({"non_potential_bonus_breaks", adv.found, adv.found ? buf : "no policy-changing bonus found"});

  const hdr::PotentialVector chain_phi{0.0, 0.5, 1.0};
  hdr::CenteringSpec frozen;
  frozen.beta = 0.0;
  frozen.seed = g.seed;
  const auto c0 = hdr::centering_conflict_demo(chain, chain_phi, frozen);
  std::snprintf(buf, sizeof(buf), "%d/%d points diverge", c0.ranking_divergences, c0.points_checked);
  rows.push_back({"frozen_baseline_neutral", c0.ranking_divergences == 0, buf});

  hdr::CenteringSpec moving = frozen;
  moving.beta = 1.0;
  const auto c1 = hdr::centering_conflict_demo(chain, chain_phi, moving);
  std::snprintf(
    buf, sizeof(buf), "diagnostic: %d/%d rankings, %d/%d argmax diverge", c1.ranking_divergences, c1.points_checked,
    c1.argmax_divergences, c1.points_checked);
  rows.push_back({"moving_baseline_conflict", true, buf});

  bool ok = true;
  std::ostringstream csv;
  csv << "check,result,detail\n";
  std::printf("%-28s %-6s %s\n", "check", "result", "detail");
  for (const auto & r : rows) {
    ok = ok && r.pass;
    std::printf("%-28s %-6s %s\n", r.check.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    csv << r.check << ',' << (r.pass ? "PASS" : "FAIL") << ",\"" << r.detail << "\"\n";
  }
  const fs::path out(g.out);
  write_provenance(out, cfg, {g.seed});
  write_file(out / "oracle.csv", csv.str());
  return ok ? kOk : kFailure;
}

int cmd_snr(const Globals & g, const hdr::RunConfig & cfg, int probes)
{
  const auto & ex = cfg.experiment;
  hdr::ProbeSpec ps;
  ps.count = probes;
  ps.seed = g.seed;
  const auto states = hdr::sample_probe_states(ex, ps);
  const std::vector<hdr::RewardVariant> all{
    hdr::RewardVariant::HDR, hdr::RewardVariant::GNR, hdr::RewardVariant::CTR, hdr::RewardVariant::CTH};
  const auto dists = hdr::action_gap_probe(states, ex, all, cfg.execution);
  const fs::path out(g.out);
  write_provenance(out, cfg, {g.seed});
  write_with(out / "action_gaps.json", [&](std::ostream & os) { hdr::write_gap_json(os, dists); });
  for (const auto v : all) {
    const auto surf = hdr::reward_surface(v, ex, {}, cfg.execution);
    const std::string stem = "surface_" + std::string(hdr::to_string(v));
    const char * names[3] = {"LC", "LK", "RC"};
    for (std::size_t k = 0; k < 3; ++k) {
      write_with(out / (stem + "_" + names[k] + ".csv"), [&](std::ostream & os) {
        hdr::write_grid_csv(os, surf.xs, surf.grids[k]);
      });
    }
    if (v == hdr::RewardVariant::HDR) {
      write_with(out / "potential.csv", [&](std::ostream & os) { hdr::write_grid_csv(os, surf.xs, surf.phi); });
    }
  }
  std::printf("%-6s %12s %12s %12s\n", "variant", "mean", "p5", "p95");
  for (const auto & d : dists) {
    std::printf(
      "%-6s %12.6f %12.6f %12.6f\n", std::string(hdr::to_string(d.variant)).c_str(), d.mean, d.p5, d.p95);
  }
  return kOk;
}

int cmd_metrics(const Globals & g, const hdr::RunConfig & cfg, const std::string & run_dir, double horizon)
{
  const fs::path dir(run_dir);
  std::ifstream steps(dir / "steps.csv", std::ios::binary);
  if (!steps) throw MissingInput("cannot open '" + (dir / "steps.csv").string() + "'");
  std::ifstream events(dir / "events.csv", std::ios::binary);
  if (!events) throw MissingInput("cannot open '" + (dir / "events.csv").string() + "'");
  const auto log = hdr::read_log(steps, events, cfg.experiment.dt_s);
  const double h = horizon > 0.0 ? horizon : log.duration_s();
  const auto m = hdr::compute_metrics(log, h, cfg.experiment.ats);
  const auto text = metrics_json(m).dump(2) + "\n";
  write_file(fs::path(g.out) / "metrics.json", text);
  std::fputs(text.c_str(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"hdrsim: cooperative-driving reward experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Config file (key = value), or 'default'");
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--episodes", g.episodes, "Episodes (seeds seed .. seed+n-1)")->check(CLI::PositiveNumber);

  std::string variant_override;
  auto * sim = app.add_subcommand("simulate", "Closed-loop episodes with the MCTS planner");
  sim->add_option("--variant", variant_override, "Reward variant (HDR, GNR, CTR, CTH)");
  auto * plan = app.add_subcommand("plan", "One planning decision with a tree dump");
  plan->add_option("--variant", variant_override, "Reward variant");
  std::vector<int> budgets;
  std::vector<std::string> variants;
  auto * sweep = app.add_subcommand("sweep", "Budget x variant grid");
  sweep->add_option("--budgets", budgets, "Strictly increasing budgets")->delimiter(',');
  sweep->add_option("--variants", variants, "Variants")->delimiter(',');
  auto * oracle = app.add_subcommand("oracle", "Tabular invariance checks");
  int probes = 240;
  auto * snr = app.add_subcommand("snr", "Action-gap distributions and reward surfaces");
  snr->add_option("--probes", probes, "Probe states")->check(CLI::PositiveNumber);
  std::string run_dir;
  double horizon = 0.0;
  auto * metrics = app.add_subcommand("metrics", "Recompute metrics from a run directory");
  metrics->add_option("--run", run_dir, "Directory holding steps.csv and events.csv")->required();
  metrics->add_option("--horizon", horizon, "Horizon in seconds (default: log duration)");

  for (auto * sc : {sim, plan, sweep, oracle, snr, metrics}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  }

  try {
    auto cfg = hdr::load_config(g.config);
    if (!variant_override.empty()) {
      auto v = hdr::parse_variant(variant_override);
      if (!v) throw hdr::ConfigError("unknown variant '" + variant_override + "'");
      cfg.variant = *v;
    }
    if (sim->parsed()) return cmd_simulate(g, cfg);
    if (plan->parsed()) return cmd_plan(g, cfg);
    if (sweep->parsed()) return cmd_sweep(g, cfg, budgets, variants);
    if (oracle->parsed()) return cmd_oracle(g, cfg);
    if (snr->parsed()) return cmd_snr(g, cfg, probes);
    if (metrics->parsed()) return cmd_metrics(g, cfg, run_dir, horizon);
  } catch (const hdr::ConfigFileError & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMissingFile;
  } catch (const MissingInput & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMissingFile;
  } catch (const hdr::ConfigError & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kBadConfig;
  } catch (const hdr::ContractViolation & e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return kContract;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kUsage;
}
