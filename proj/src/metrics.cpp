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

#include "hdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace hdr
{

namespace
{
constexpr double kVehicleLength = 5.0;

double unit_clamp(double v) { return std::clamp(v, 0.0, 1.0); }

MetricSummary summarize(const std::vector<double> & xs)
{
  MetricSummary s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
  }
  return s;
}
}  // namespace

void AtsWeights::validate() const
{
  const double sum = velocity + ttc + success + collisions + jerk;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("ATS weights must sum to 1");
  }
  if (velocity < 0 || ttc < 0 || success < 0 || collisions < 0 || jerk < 0) {
    throw std::invalid_argument("ATS weights must be non-negative");
  }
  if (!(velocity_anchor > 0 && ttc_anchor > 0 && collisions_anchor > 0 && jerk_anchor > 0)) {
    throw std::invalid_argument("ATS anchors must be positive");
  }
}

MetricsReport compute_metrics(const TrajectoryLog & log, double horizon_s, const AtsWeights & w)
{
  if (log.steps <= 0) {
    throw std::invalid_argument("compute_metrics: log covers no steps");
  }
  if (!(horizon_s > 0.0)) {
    throw std::invalid_argument("compute_metrics: horizon must be positive");
  }
  MetricsReport m;
  m.duration_s = horizon_s;
  const double hours = horizon_s / 3600.0;
  const auto & rows = log.rows;

  // Per-time-slice fleet speed and TTC against the same-lane leader.
  std::map<VehicleId, double> min_ttc;
  double speed_sum = 0.0;
  int slices = 0;
  for (std::size_t begin = 0; begin < rows.size();) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].t == rows[begin].t) ++end;
    double fleet = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto & self = rows[i];
      fleet += self.v_x;
      const LogRow * leader = nullptr;
      for (std::size_t j = begin; j < end; ++j) {
        const auto & o = rows[j];
        if (j == i || o.lane != self.lane) continue;
        const bool ahead = o.x > self.x || (o.x == self.x && o.id > self.id);
        if (ahead && (!leader || o.x < leader->x)) leader = &o;
      }
      double ttc = kTtcCap;
      if (leader) {
        const double h = leader->x - self.x - kVehicleLength;
        if (self.v_x > leader->v_x && h > 0.0) ttc = std::min(kTtcCap, h / (self.v_x - leader->v_x));
      }
      auto [it, inserted] = min_ttc.emplace(self.id, ttc);
      if (!inserted) it->second = std::min(it->second, ttc);
    }
    speed_sum += fleet / static_cast<double>(end - begin);
    ++slices;
    begin = end;
  }
  m.avg_velocity = slices > 0 ? speed_sum / slices : 0.0;
  if (!min_ttc.empty()) {
    double s = 0.0;
    for (const auto & [id, t] : min_ttc) s += t;
    m.avg_min_ttc = s / static_cast<double>(min_ttc.size());
  }

  // Jerk and lane-change intervals from consecutive rows of each vehicle.
  struct Track
  {
    double t;
    double a_x;
    int lane;
    std::vector<double> lc_times;
  };
  std::map<VehicleId, Track> tracks;
  double jerk_sum = 0.0;
  long jerk_n = 0;
  for (const auto & r : rows) {
    auto it = tracks.find(r.id);
    if (it == tracks.end()) {
      tracks.emplace(r.id, Track{r.t, r.a_x, r.lane, {}});
      continue;
    }
    auto & tr = it->second;
    if (std::abs(r.t - tr.t - log.dt) < 1e-6) {
      jerk_sum += std::abs(r.a_x - tr.a_x) / log.dt;
      ++jerk_n;
    }
    if (r.lane != tr.lane) tr.lc_times.push_back(r.t);
    tr.t = r.t;
    tr.a_x = r.a_x;
    tr.lane = r.lane;
  }
  m.avg_abs_jerk = jerk_n > 0 ? jerk_sum / static_cast<double>(jerk_n) : 0.0;
  double interval_sum = 0.0;
  int interval_n = 0;
  for (const auto & [id, tr] : tracks) {
    for (std::size_t k = 1; k < tr.lc_times.size(); ++k) {
      interval_sum += tr.lc_times[k] - tr.lc_times[k - 1];
      ++interval_n;
    }
  }
  if (interval_n > 0) m.avg_lc_interval = interval_sum / interval_n;

  // Exits, collisions and CAV task outcomes.
  std::set<VehicleId> crashed_cavs;
  for (const auto & e : log.events) {
    if (e.type == EventType::Exit) {
      ++m.exits;
      if (e.kind == VehicleKind::Cav) {
        ++m.cav_finished;
        if (e.success) ++m.cav_succeeded;
      }
    } else {
      ++m.collisions;
      if (e.kind == VehicleKind::Cav) crashed_cavs.insert(e.id);
      if (e.other_kind == VehicleKind::Cav) crashed_cavs.insert(e.other);
    }
  }
  m.cav_finished += static_cast<int>(crashed_cavs.size());
  if (m.cav_finished > 0) {
    m.success_rate = static_cast<double>(m.cav_succeeded) / m.cav_finished;
  }
  m.inst_flow = m.exits / hours;
  m.collisions_per_hour = m.collisions / hours;
  m.ats = ats(m, w);
  return m;
}

double ats(const MetricsReport & r, const AtsWeights & w)
{
  w.validate();
  double score = w.velocity * unit_clamp(r.avg_velocity / w.velocity_anchor) +
                 w.ttc * unit_clamp(r.avg_min_ttc / w.ttc_anchor) +
                 w.collisions * (1.0 - std::min(r.collisions_per_hour / w.collisions_anchor, 1.0)) +
                 w.jerk * (1.0 - std::min(r.avg_abs_jerk / w.jerk_anchor, 1.0));
  if (r.success_rate) {
    return score + w.success * unit_clamp(*r.success_rate);
  }
  const double rest = 1.0 - w.success;
  return rest > 0.0 ? score / rest : 0.0;
}

AggregateReport aggregate(std::span<const MetricsReport> reports)
{
  std::vector<double> flow, vel, ttc, coll, succ, jerk, lc, score;
  for (const auto & r : reports) {
    flow.push_back(r.inst_flow);
    vel.push_back(r.avg_velocity);
    ttc.push_back(r.avg_min_ttc);
    coll.push_back(r.collisions_per_hour);
    if (r.success_rate) succ.push_back(*r.success_rate);
    jerk.push_back(r.avg_abs_jerk);
    if (r.avg_lc_interval) lc.push_back(*r.avg_lc_interval);
    score.push_back(r.ats);
  }
  AggregateReport a;
  a.inst_flow = summarize(flow);
  a.avg_velocity = summarize(vel);
  a.avg_min_ttc = summarize(ttc);
  a.collisions_per_hour = summarize(coll);
  a.success_rate = summarize(succ);
  a.avg_abs_jerk = summarize(jerk);
  a.avg_lc_interval = summarize(lc);
  a.ats = summarize(score);
  return a;
}

SignTest sign_test_greater(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) {
    throw std::invalid_argument("sign test needs paired samples");
  }
  SignTest st;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++st.wins;
    } else if (a[i] < b[i]) {
      ++st.losses;
    } else {
      ++st.ties;
    }
  }
  const int n = st.wins + st.losses;
  if (n == 0) return st;
  // Upper binomial tail in log space.
  double tail = 0.0;
  for (int k = st.wins; k <= n; ++k) {
    const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    tail += std::exp(log_c - n * std::log(2.0));
  }
  st.p_value = std::min(1.0, tail);
  return st;
}

}  // namespace hdr
