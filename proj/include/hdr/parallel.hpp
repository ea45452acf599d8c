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

#ifndef HDR__PARALLEL_HPP_
#define HDR__PARALLEL_HPP_

#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string_view>

#include <omp.h>

namespace hdr
{

/// Serial is the reference path; Parallel fans independent work items out
/// over OpenMP threads. Both write results by index, so outputs match.
enum class ExecutionMode : std::uint8_t { Serial, Parallel };

inline std::string_view to_string(ExecutionMode m)
{
  return m == ExecutionMode::Serial ? "serial" : "parallel";
}

inline std::optional<ExecutionMode> parse_execution_mode(std::string_view s)
{
  if (s == "serial") return ExecutionMode::Serial;
  if (s == "parallel") return ExecutionMode::Parallel;
  return std::nullopt;
}

inline int max_threads() { return omp_get_max_threads(); }

/// Calls f(i) for i in [0, n). The first exception thrown by any item is
/// rethrown after the loop.
template <class F>
void for_each_index(std::int64_t n, ExecutionMode mode, F && f)
{
  if (mode == ExecutionMode::Serial) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hdr

#endif  // HDR__PARALLEL_HPP_
