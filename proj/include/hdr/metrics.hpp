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

#ifndef HDR__METRICS_HPP_
#define HDR__METRICS_HPP_

#include "hdr/trajectory_log.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hdr
{

/// Minimum TTC is capped here before averaging (an unthreatened vehicle
/// would otherwise contribute +inf).
inline constexpr double kTtcCap = 10.0;

struct MetricsReport
{
  double inst_flow{0.0};            // exits per hour
  double avg_velocity{0.0};         // m/s
  double avg_min_ttc{kTtcCap};      // s, capped
  double collisions_per_hour{0.0};
  std::optional<double> success_rate{};  // absent when no CAV finished
  double avg_abs_jerk{0.0};         // m/s^3
  std::optional<double> avg_lc_interval{};  // s, absent without repeated changes
  double ats{0.0};

  int exits{0};
  int collisions{0};
  int cav_finished{0};
  int cav_succeeded{0};
  double duration_s{0.0};
};

/// Weights and normalisation anchors of the composite traffic score.
struct AtsWeights
{
  double velocity{0.25};
  double ttc{0.15};
  double success{0.30};
  double collisions{0.20};
  double jerk{0.10};
  double velocity_anchor{30.0};
  double ttc_anchor{10.0};
  double collisions_anchor{1.0};
  double jerk_anchor{5.0};

  void validate() const;

  friend bool operator==(const AtsWeights &, const AtsWeights &) = default;
};

/// Throws std::invalid_argument on an empty log or non-positive horizon.
MetricsReport compute_metrics(const TrajectoryLog & log, double horizon_s, const AtsWeights & w = {});

/// Weighted normalised score in [0, 1]. Without a success rate the remaining
/// weights are renormalised.
double ats(const MetricsReport & report, const AtsWeights & w = {});

struct MetricSummary
{
  double mean{0.0};
  double std{0.0};
  int n{0};
};

struct AggregateReport
{
  MetricSummary inst_flow, avg_velocity, avg_min_ttc, collisions_per_hour, success_rate,
    avg_abs_jerk, avg_lc_interval, ats;
};

AggregateReport aggregate(std::span<const MetricsReport> reports);

struct SignTest
{
  int wins{0};
  int losses{0};
  int ties{0};
  /// P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
  double p_value{1.0};
};

/// One-sided paired sign test of H1: a tends to exceed b.
SignTest sign_test_greater(std::span<const double> a, std::span<const double> b);

}  // namespace hdr

#endif  // HDR__METRICS_HPP_
