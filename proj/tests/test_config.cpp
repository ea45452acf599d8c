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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

namespace hdr
{
namespace
{

TEST(Config, DefaultsAreValid)
{
  const RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(load_config("default"), cfg);
  EXPECT_EQ(load_config(""), cfg);
  EXPECT_EQ(parse_config(""), cfg);
  EXPECT_EQ(cfg.experiment.search.budget, 200);
  EXPECT_EQ(cfg.experiment.sim.kin.action_accel_mps2, 1.0);
  EXPECT_EQ(cfg.sweep_budgets, (std::vector<int>{50, 100, 200, 400}));
}

TEST(Config, EmitParseRoundTrip)
{
  RunConfig cfg;
  cfg.variant = RewardVariant::CTH;
  cfg.experiment.search.budget = 123;
  cfg.experiment.search.rollout_policy = RolloutPolicy::GreedyArg;
  cfg.experiment.reward.sigma = 0.37;
  cfg.experiment.scenario.controller = Controller::KeepLane;
  cfg.experiment.scenario.stop_when_no_cavs = false;
  cfg.sweep_variants = {RewardVariant::GNR, RewardVariant::HDR};
  cfg.sweep_budgets = {10, 20};
  cfg.execution = ExecutionMode::Serial;
  const auto text = emit_config(cfg);
  EXPECT_EQ(parse_config(text), cfg);
  EXPECT_EQ(emit_config(parse_config(text)), text);
  EXPECT_EQ(parse_config(emit_config(RunConfig{})), RunConfig{});
}

TEST(Config, EveryKeyIsEmittedOnce)
{
  const auto keys = config_keys();
  const std::set<std::string> unique(keys.begin(), keys.end());
  EXPECT_EQ(unique.size(), keys.size());
  const auto text = emit_config(RunConfig{});
  for (const auto & k : keys) EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
}

TEST(Config, CommentsAndWhitespace)
{
  const auto cfg = parse_config("# header\n\n  budget =  77   # trailing\r\nvariant=GNR\n");
  EXPECT_EQ(cfg.experiment.search.budget, 77);
  EXPECT_EQ(cfg.variant, RewardVariant::GNR);
}

TEST(Config, SharedValuesAreSynchronised)
{
  const auto cfg = parse_config("v_max = 25\nlane_width = 3.5\ngamma = 0.99\nroad_length = 300\n");
  const auto & ex = cfg.experiment;
  EXPECT_EQ(ex.sim.hdv.v_max, 25.0);
  EXPECT_EQ(ex.reward.v_max, 25.0);
  EXPECT_EQ(ex.reward.lane_width_m, 3.5);
  EXPECT_EQ(ex.search.discount, 0.99);
  EXPECT_EQ(ex.reward.x_goal_m, 300.0);
  EXPECT_EQ(parse_config("road_length = 300\nx_goal = 200\n").experiment.reward.x_goal_m, 200.0);
}

TEST(Config, InvalidValuesAreRejected)
{
  EXPECT_THROW(parse_config("w_trd = 0.5\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("w_trd = 0.5\nw_arg = 0.5\n"));
  EXPECT_THROW(parse_config("sigma = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("budget = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("budget = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("budget = many\n"), ConfigError);
  EXPECT_THROW(parse_config("variant = hdr2\n"), ConfigError);
  EXPECT_THROW(parse_config("rollout_policy = greedy\n"), ConfigError);
  EXPECT_THROW(parse_config("controller = pid\n"), ConfigError);
  EXPECT_THROW(parse_config("execution = gpu\n"), ConfigError);
  EXPECT_THROW(parse_config("stop_when_no_cavs = yes\n"), ConfigError);
  EXPECT_THROW(parse_config("sweep_budgets = 100,50\n"), ConfigError);
  EXPECT_THROW(parse_config("initial_cavs = 5\n"), ConfigError);
}

TEST(Config, StructuralErrorsNameTheLine)
{
  try {
    parse_config("budget = 10\nnot_a_key = 3\n", "x.cfg");
    FAIL();
  } catch (const ConfigError & e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("not_a_key"), std::string::npos);
  }
  EXPECT_THROW(parse_config("budget = 1\nbudget = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("budget 10\n"), ConfigError);
}

TEST(Config, FileLoading)
{
  EXPECT_THROW(load_config("/nonexistent/dir/none.cfg"), ConfigFileError);
  const auto path = std::filesystem::temp_directory_path() / "hdr_test_config.cfg";
  {
    std::ofstream out(path);
    out << "seed_unused_comment = 1\n";
  }
  EXPECT_THROW(load_config(path.string()), ConfigError);
  {
    std::ofstream out(path);
    out << "budget = 42\n";
  }
  EXPECT_EQ(load_config(path.string()).experiment.search.budget, 42);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hdr
