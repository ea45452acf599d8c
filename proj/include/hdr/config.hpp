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

#ifndef HDR__CONFIG_HPP_
#define HDR__CONFIG_HPP_

#include "hdr/evaluation.hpp"
#include "hdr/parallel.hpp"
#include "hdr/rewards.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdr
{

/// Full parameter bundle of a run.
struct RunConfig
{
  Experiment experiment{};
  RewardVariant variant{RewardVariant::HDR};
  std::vector<RewardVariant> sweep_variants{
    RewardVariant::HDR, RewardVariant::GNR, RewardVariant::CTR, RewardVariant::CTH};
  std::vector<int> sweep_budgets{50, 100, 200, 400};
  ExecutionMode execution{ExecutionMode::Parallel};

  void validate() const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// The config file could not be opened.
class ConfigFileError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Syntax error, unknown key, bad value or violated invariant.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Parses `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults. `x_goal` follows `road_length` unless set explicitly.
RunConfig parse_config(std::string_view text, std::string_view origin = "<string>");

/// "default" (or an empty path) returns the built-in defaults.
RunConfig load_config(const std::string & path);

/// Every key with its current value, in a stable order.
std::string emit_config(const RunConfig & cfg);

std::vector<std::string> config_keys();

}  // namespace hdr

#endif  // HDR__CONFIG_HPP_
