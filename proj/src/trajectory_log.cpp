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

#include "hdr/trajectory_log.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hdr
{

namespace
{
std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string & s, int line_no)
{
  double v = 0.0;
  const auto * end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

long to_long(const std::string & s, int line_no)
{
  long v = 0;
  const auto * end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

VehicleKind to_kind(const std::string & s, int line_no)
{
  auto k = parse_kind(s);
  if (!k) throw std::runtime_error("line " + std::to_string(line_no) + ": bad vehicle kind '" + s + "'");
  return *k;
}
}  // namespace

std::string format_double(double v)
{
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

void TrajectoryLog::append_step(
  const WorldState & world, const JointAction & actions, const StepOutcome & outcome,
  const RewardBreakdown & reward)
{
  for (const auto & v : world.vehicles) {
    LogRow r;
    r.t = world.t_s;
    r.id = v.id;
    r.kind = v.kind;
    r.lane = v.lane;
    r.x = v.x_m;
    r.v_x = v.v_x;
    r.a_x = v.a_x;
    if (v.is_cav()) {
      auto it = actions.find(v.id);
      if (it != actions.end()) {
        r.lat_action = it->second.lateral;
        r.long_action = it->second.longitudinal;
      }
      for (const auto & c : reward.cavs) {
        if (c.id == v.id) {
          r.r_trd = c.r_trd;
          r.r_arg = c.r_arg;
          r.r_freq = c.r_freq;
        }
      }
    } else {
      for (const auto & [id, lat] : outcome.hdv_decisions) {
        if (id == v.id) r.lat_action = lat;
      }
    }
    for (const auto & s : reward.safety) {
      if (s.id == v.id) r.r_safe_j = s.r_safe;
    }
    rows.push_back(r);
  }

  const double t_end = outcome.next_state.t_s;
  for (const auto & [a, b] : outcome.collisions) {
    LogEvent e;
    e.t = t_end;
    e.type = EventType::Collision;
    e.id = a;
    e.other = b;
    e.kind = world.find(a) ? world.find(a)->kind : VehicleKind::Hdv;
    e.other_kind = world.find(b) ? world.find(b)->kind : VehicleKind::Hdv;
    events.push_back(e);
  }
  for (const auto & d : outcome.despawned) {
    LogEvent e;
    e.t = t_end;
    e.type = EventType::Exit;
    e.id = d.id;
    e.kind = d.kind;
    e.success = d.success;
    events.push_back(e);
  }
  ++steps;
}

void write_steps_csv(std::ostream & os, const TrajectoryLog & log)
{
  os << "t,id,kind,lane,x,v_x,a_x,lat_action,long_action,r_trd,r_arg,r_freq,r_safe_j\n";
  for (const auto & r : log.rows) {
    os << format_double(r.t) << ',' << r.id << ',' << to_string(r.kind) << ',' << r.lane << ','
       << format_double(r.x) << ',' << format_double(r.v_x) << ',' << format_double(r.a_x) << ','
       << (r.lat_action ? to_string(*r.lat_action) : "") << ','
       << (r.long_action ? to_string(*r.long_action) : "") << ',' << format_double(r.r_trd) << ','
       << format_double(r.r_arg) << ',' << format_double(r.r_freq) << ',' << format_double(r.r_safe_j)
       << '\n';
  }
}

void write_events_csv(std::ostream & os, const TrajectoryLog & log)
{
  os << "t,event,id,kind,other,other_kind,success\n";
  for (const auto & e : log.events) {
    os << format_double(e.t) << ',' << (e.type == EventType::Exit ? "exit" : "collision") << ',' << e.id
       << ',' << to_string(e.kind) << ',';
    if (e.type == EventType::Collision) {
      os << e.other << ',' << to_string(e.other_kind) << ",\n";
    } else {
      os << ",," << (e.success ? 1 : 0) << '\n';
    }
  }
}

TrajectoryLog read_log(std::istream & steps_csv, std::istream & events_csv, double dt)
{
  TrajectoryLog log;
  log.dt = dt;
  std::string line;
  int line_no = 0;
  if (!std::getline(steps_csv, line)) {
    throw std::runtime_error("step log is empty");
  }
  ++line_no;
  double last_t = -1.0;
  while (std::getline(steps_csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 13 fields");
    }
    LogRow r;
    r.t = to_double(f[0], line_no);
    r.id = static_cast<VehicleId>(to_long(f[1], line_no));
    r.kind = to_kind(f[2], line_no);
    r.lane = static_cast<int>(to_long(f[3], line_no));
    r.x = to_double(f[4], line_no);
    r.v_x = to_double(f[5], line_no);
    r.a_x = to_double(f[6], line_no);
    if (!f[7].empty()) {
      r.lat_action = parse_lateral(f[7]);
      if (!r.lat_action) throw std::runtime_error("line " + std::to_string(line_no) + ": bad lateral action");
    }
    if (!f[8].empty()) {
      r.long_action = parse_longitudinal(f[8]);
      if (!r.long_action) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad longitudinal action");
      }
    }
    r.r_trd = to_double(f[9], line_no);
    r.r_arg = to_double(f[10], line_no);
    r.r_freq = to_double(f[11], line_no);
    r.r_safe_j = to_double(f[12], line_no);
    if (r.t != last_t) {
      ++log.steps;
      last_t = r.t;
    }
    log.rows.push_back(r);
  }

  line_no = 0;
  if (!std::getline(events_csv, line)) {
    throw std::runtime_error("event log is empty");
  }
  ++line_no;
  while (std::getline(events_csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw std::runtime_error("events line " + std::to_string(line_no) + ": expected 7 fields");
    }
    LogEvent e;
    e.t = to_double(f[0], line_no);
    if (f[1] == "exit") {
      e.type = EventType::Exit;
      e.success = to_long(f[6], line_no) != 0;
    } else if (f[1] == "collision") {
      e.type = EventType::Collision;
      e.other = static_cast<VehicleId>(to_long(f[4], line_no));
      e.other_kind = to_kind(f[5], line_no);
    } else {
      throw std::runtime_error("events line " + std::to_string(line_no) + ": unknown event '" + f[1] + "'");
    }
    e.id = static_cast<VehicleId>(to_long(f[2], line_no));
    e.kind = to_kind(f[3], line_no);
    log.events.push_back(e);
  }
  return log;
}

}  // namespace hdr
