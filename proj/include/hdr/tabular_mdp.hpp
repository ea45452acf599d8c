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

#ifndef HDR__TABULAR_MDP_HPP_
#define HDR__TABULAR_MDP_HPP_

#include "hdr/parallel.hpp"
#include "hdr/random.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hdr
{

/// Finite MDP with dense P[s][a][s'] and R[s][a][s'] stored row-major.
struct TabularMDP
{
  int n_states{0};
  int n_actions{0};
  double gamma{0.9};
  std::vector<double> P;
  std::vector<double> R;

  static TabularMDP zeros(int n_states, int n_actions, double gamma);

  std::size_t index(int s, int a, int t) const
  {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions) + static_cast<std::size_t>(a)) *
             static_cast<std::size_t>(n_states) +
           static_cast<std::size_t>(t);
  }
  double & p(int s, int a, int t) { return P[index(s, a, t)]; }
  double p(int s, int a, int t) const { return P[index(s, a, t)]; }
  double & r(int s, int a, int t) { return R[index(s, a, t)]; }
  double r(int s, int a, int t) const { return R[index(s, a, t)]; }

  /// Throws ContractViolation on bad sizes, negative or non-normalised rows
  /// (1e-12), non-finite rewards or gamma outside (0, 1).
  void validate() const;
};

using PotentialVector = std::vector<double>;

struct ValueIterationResult
{
  /// Q[s * n_actions + a].
  std::vector<double> Q;
  std::vector<double> V;
  /// Greedy action set per state (all actions within tie_tol of the max).
  std::vector<std::vector<int>> policy;
  int iterations{0};
  /// Sup-norm change of Q per sweep.
  std::vector<double> deltas;
};

inline constexpr double kTieTolerance = 1e-9;

/// Jacobi value iteration on Q until the sweep change drops below
/// tol * (1 - gamma) / gamma. Both modes produce bit-identical iterates.
ValueIterationResult value_iteration(
  const TabularMDP & m, double tol, ExecutionMode mode = ExecutionMode::Serial,
  double tie_tol = kTieTolerance, int max_iterations = 1000000);

/// Greedy sets of an arbitrary Q table.
std::vector<std::vector<int>> greedy_sets(const std::vector<double> & Q, int n_states, int n_actions, double tie_tol);

/// R'(s, a, s') = R + gamma * phi(s') - phi(s).
TabularMDP shape_with_trd(const TabularMDP & m, const PotentialVector & phi);

/// R'(s, a, s') = R + B[s * n_actions + a]; an arbitrary, non-potential bonus.
TabularMDP shape_with_bonus(const TabularMDP & m, const std::vector<double> & bonus);

struct InvarianceReport
{
  bool policy_sets_equal{false};
  /// max over (s, a) of |Q'*(s, a) - (Q*(s, a) - phi(s))|.
  double max_shift_error{0.0};
  int mismatched_states{0};
};

InvarianceReport verify_invariance(
  const TabularMDP & m, const PotentialVector & phi, double tol, ExecutionMode mode = ExecutionMode::Serial);

/// Dirichlet(1) transition rows, Uniform(-1, 1) rewards.
TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng & rng);
/// Uniform(lo, hi) potential per state.
PotentialVector random_potential(int n_states, Rng & rng, double lo = 0.0, double hi = 1.0);

struct BatchSpec
{
  int instances{50};
  int n_states{20};
  int n_actions{4};
  double gamma{0.9};
  double tol{1e-11};
  std::uint64_t seed{7};
};

/// Instance i is drawn from Rng(mix_seed(seed, i)); instances run concurrently
/// in Parallel mode with results in instance order.
std::vector<InvarianceReport> verify_random_batch(const BatchSpec & spec, ExecutionMode mode);

/// Three states, two actions: "wait" (small reward, stay or fall back) and
/// "advance" toward an absorbing goal that pays on entry.
TabularMDP three_state_chain(double gamma = 0.9);

struct AdversarialResult
{
  bool found{false};
  int tries{0};
  std::vector<double> bonus;
  InvarianceReport report;
};

/// Draws Uniform(-scale, scale) per-(s, a) bonuses until one changes some
/// greedy set. The bonus is compared against the unshaped optimum directly.
AdversarialResult find_policy_changing_bonus(
  const TabularMDP & m, std::uint64_t seed, int max_tries = 1000, double scale = 1.0);

struct CenteringReport
{
  int points_checked{0};
  /// Points where some pair of actions is ordered differently.
  int ranking_divergences{0};
  /// Points where the greedy set differs.
  int argmax_divergences{0};
  double max_baseline{0.0};
};

struct CenteringSpec
{
  double beta{0.5};
  /// Lookahead depth of the brute-force enumeration.
  int horizon{5};
  int trajectories{12};
  /// Steps walked along each trajectory.
  int trajectory_length{6};
  std::uint64_t seed{1};
};

/// Compares action rankings of the TRD-shaped rewards with the same rewards
/// after an EMA baseline (rate beta) that is updated within the episode.
/// Both sides are H-step lookahead values with the shaped optimal policy as
/// continuation, evaluated exactly by enumerating successors.
CenteringReport centering_conflict_demo(const TabularMDP & m, const PotentialVector & phi, const CenteringSpec & spec);

}  // namespace hdr

#endif  // HDR__TABULAR_MDP_HPP_
