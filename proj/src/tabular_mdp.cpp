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

#include "hdr/tabular_mdp.hpp"

#include "hdr/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hdr
{

namespace
{
std::vector<double> expected_rewards(const TabularMDP & m)
{
  std::vector<double> rbar(static_cast<std::size_t>(m.n_states * m.n_actions), 0.0);
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      double acc = 0.0;
      for (int t = 0; t < m.n_states; ++t) acc += m.p(s, a, t) * m.r(s, a, t);
      rbar[static_cast<std::size_t>(s * m.n_actions + a)] = acc;
    }
  }
  return rbar;
}

bool same_sets(const std::vector<std::vector<int>> & a, const std::vector<std::vector<int>> & b, int & mismatched)
{
  mismatched = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] != b[s]) ++mismatched;
  }
  return mismatched == 0;
}

int sign_with_tol(double d)
{
  if (d > kTieTolerance) return 1;
  if (d < -kTieTolerance) return -1;
  return 0;
}

struct Lookahead
{
  const TabularMDP & m;
  const std::vector<int> & policy;
  double beta;

  /// Expected sum of the next k (optionally centered) rewards after taking a
  /// in s with baseline b, then following `policy`.
  double value(int s, int a, double b, int k, bool centered) const
  {
    double acc = 0.0;
    for (int t = 0; t < m.n_states; ++t) {
      const double p = m.p(s, a, t);
      if (p == 0.0) continue;
      const double r = m.r(s, a, t);
      double g = centered ? r - b : r;
      if (k > 1) {
        const double b_next = b + beta * (r - b);
        g += m.gamma * value(t, policy[static_cast<std::size_t>(t)], b_next, k - 1, centered);
      }
      acc += p * g;
    }
    return acc;
  }
};
}  // namespace

TabularMDP TabularMDP::zeros(int n_states, int n_actions, double gamma)
{
  if (n_states < 1 || n_actions < 1) throw ContractViolation("MDP needs at least one state and action");
  TabularMDP m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  const auto n = static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions) *
                 static_cast<std::size_t>(n_states);
  m.P.assign(n, 0.0);
  m.R.assign(n, 0.0);
  return m;
}

void TabularMDP::validate() const
{
  if (n_states < 1 || n_actions < 1) throw ContractViolation("MDP needs at least one state and action");
  const auto n = static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions) *
                 static_cast<std::size_t>(n_states);
  if (P.size() != n || R.size() != n) throw ContractViolation("MDP tensor sizes do not match dimensions");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ContractViolation("MDP discount must lie in (0, 1)");
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (int t = 0; t < n_states; ++t) {
        const double q = p(s, a, t);
        if (!(q >= 0.0)) {
          throw ContractViolation("negative transition probability at s=" + std::to_string(s));
        }
        if (!std::isfinite(r(s, a, t))) throw ContractViolation("non-finite reward");
        sum += q;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ContractViolation(
          "transition row (" + std::to_string(s) + ", " + std::to_string(a) + ") sums to " + std::to_string(sum));
      }
    }
  }
}

std::vector<std::vector<int>> greedy_sets(const std::vector<double> & Q, int n_states, int n_actions, double tie_tol)
{
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_states));
  for (int s = 0; s < n_states; ++s) {
    const auto row = Q.begin() + s * n_actions;
    const double best = *std::max_element(row, row + n_actions);
    for (int a = 0; a < n_actions; ++a) {
      if (row[a] >= best - tie_tol) out[static_cast<std::size_t>(s)].push_back(a);
    }
  }
  return out;
}

ValueIterationResult value_iteration(
  const TabularMDP & m, double tol, ExecutionMode mode, double tie_tol, int max_iterations)
{
  m.validate();
  if (!(tol > 0.0)) throw ContractViolation("value iteration tolerance must be positive");
  const int nS = m.n_states;
  const int nA = m.n_actions;
  const auto rbar = expected_rewards(m);
  const double stop = tol * (1.0 - m.gamma) / m.gamma;

  ValueIterationResult res;
  std::vector<double> q(static_cast<std::size_t>(nS * nA), 0.0);
  std::vector<double> q_next(q.size(), 0.0);
  std::vector<double> v(static_cast<std::size_t>(nS), 0.0);

  for (int it = 0; it < max_iterations; ++it) {
    double delta = 0.0;
    if (mode == ExecutionMode::Serial) {
      for (int sa = 0; sa < nS * nA; ++sa) {
        const int s = sa / nA;
        const int a = sa % nA;
        double acc = 0.0;
        for (int t = 0; t < nS; ++t) acc += m.p(s, a, t) * v[static_cast<std::size_t>(t)];
        const double nq = rbar[static_cast<std::size_t>(sa)] + m.gamma * acc;
        delta = std::max(delta, std::abs(nq - q[static_cast<std::size_t>(sa)]));
        q_next[static_cast<std::size_t>(sa)] = nq;
      }
    } else {
#pragma omp parallel for reduction(max : delta) schedule(static)
      for (int sa = 0; sa < nS * nA; ++sa) {
        const int s = sa / nA;
        const int a = sa % nA;
        double acc = 0.0;
        for (int t = 0; t < nS; ++t) acc += m.p(s, a, t) * v[static_cast<std::size_t>(t)];
        const double nq = rbar[static_cast<std::size_t>(sa)] + m.gamma * acc;
        delta = std::max(delta, std::abs(nq - q[static_cast<std::size_t>(sa)]));
        q_next[static_cast<std::size_t>(sa)] = nq;
      }
    }
    q.swap(q_next);
    for (int s = 0; s < nS; ++s) {
      const auto row = q.begin() + s * nA;
      v[static_cast<std::size_t>(s)] = *std::max_element(row, row + nA);
    }
    res.deltas.push_back(delta);
    res.iterations = it + 1;
    if (delta < stop) break;
  }
  res.Q = std::move(q);
  res.V = std::move(v);
  res.policy = greedy_sets(res.Q, nS, nA, tie_tol);
  return res;
}

TabularMDP shape_with_trd(const TabularMDP & m, const PotentialVector & phi)
{
  if (phi.size() != static_cast<std::size_t>(m.n_states)) {
    throw ContractViolation("potential has " + std::to_string(phi.size()) + " entries, MDP has " +
                            std::to_string(m.n_states) + " states");
  }
  TabularMDP out = m;
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      for (int t = 0; t < m.n_states; ++t) {
        out.r(s, a, t) += m.gamma * phi[static_cast<std::size_t>(t)] - phi[static_cast<std::size_t>(s)];
      }
    }
  }
  return out;
}

TabularMDP shape_with_bonus(const TabularMDP & m, const std::vector<double> & bonus)
{
  if (bonus.size() != static_cast<std::size_t>(m.n_states * m.n_actions)) {
    throw ContractViolation("bonus must hold one entry per state-action pair");
  }
  TabularMDP out = m;
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      for (int t = 0; t < m.n_states; ++t) out.r(s, a, t) += bonus[static_cast<std::size_t>(s * m.n_actions + a)];
    }
  }
  return out;
}

InvarianceReport verify_invariance(const TabularMDP & m, const PotentialVector & phi, double tol, ExecutionMode mode)
{
  const auto base = value_iteration(m, tol, mode);
  const auto shaped = value_iteration(shape_with_trd(m, phi), tol, mode);
  InvarianceReport rep;
  rep.policy_sets_equal = same_sets(base.policy, shaped.policy, rep.mismatched_states);
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      const auto i = static_cast<std::size_t>(s * m.n_actions + a);
      rep.max_shift_error =
        std::max(rep.max_shift_error, std::abs(shaped.Q[i] - (base.Q[i] - phi[static_cast<std::size_t>(s)])));
    }
  }
  return rep;
}

TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng & rng)
{
  TabularMDP m = TabularMDP::zeros(n_states, n_actions, gamma);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (int t = 0; t < n_states; ++t) {
        const double e = -std::log1p(-rng.uniform());
        m.p(s, a, t) = e;
        sum += e;
      }
      for (int t = 0; t < n_states; ++t) {
        m.p(s, a, t) /= sum;
        m.r(s, a, t) = rng.uniform(-1.0, 1.0);
      }
    }
  }
  // Renormalise once more so every row sums to 1 within rounding.
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (int t = 0; t < n_states; ++t) sum += m.p(s, a, t);
      m.p(s, a, n_states - 1) += 1.0 - sum;
    }
  }
  return m;
}

PotentialVector random_potential(int n_states, Rng & rng, double lo, double hi)
{
  PotentialVector phi(static_cast<std::size_t>(n_states));
  for (auto & x : phi) x = rng.uniform(lo, hi);
  return phi;
}

std::vector<InvarianceReport> verify_random_batch(const BatchSpec & spec, ExecutionMode mode)
{
  if (spec.instances < 0) throw ContractViolation("instance count must be non-negative");
  std::vector<InvarianceReport> out(static_cast<std::size_t>(spec.instances));
  for_each_index(spec.instances, mode, [&](std::int64_t i) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(i)));
    const auto m = random_mdp(spec.n_states, spec.n_actions, spec.gamma, rng);
    const auto phi = random_potential(spec.n_states, rng);
    out[static_cast<std::size_t>(i)] = verify_invariance(m, phi, spec.tol, ExecutionMode::Serial);
  });
  return out;
}

TabularMDP three_state_chain(double gamma)
{
  TabularMDP m = TabularMDP::zeros(3, 2, gamma);
  // s0: wait stays, advance reaches s1.
  m.p(0, 0, 0) = 1.0;
  m.r(0, 0, 0) = 0.1;
  m.p(0, 1, 1) = 1.0;
  // s1: wait falls back with probability 0.5, advance hits the goal w.p. 0.8.
  m.p(1, 0, 0) = 0.5;
  m.p(1, 0, 1) = 0.5;
  m.r(1, 0, 0) = 0.1;
  m.r(1, 0, 1) = 0.1;
  m.p(1, 1, 2) = 0.8;
  m.p(1, 1, 0) = 0.2;
  m.r(1, 1, 2) = 1.0;
  // s2 absorbing.
  m.p(2, 0, 2) = 1.0;
  m.p(2, 1, 2) = 1.0;
  m.r(2, 1, 2) = 0.05;
  return m;
}

AdversarialResult find_policy_changing_bonus(const TabularMDP & m, std::uint64_t seed, int max_tries, double scale)
{
  const double tol = 1e-11;
  const auto base = value_iteration(m, tol);
  Rng rng(seed);
  AdversarialResult res;
  for (int k = 0; k < max_tries; ++k) {
    res.tries = k + 1;
    std::vector<double> bonus(static_cast<std::size_t>(m.n_states * m.n_actions));
    for (auto & b : bonus) b = rng.uniform(-scale, scale);
    const auto shaped = value_iteration(shape_with_bonus(m, bonus), tol);
    InvarianceReport rep;
    rep.policy_sets_equal = same_sets(base.policy, shaped.policy, rep.mismatched_states);
    for (std::size_t i = 0; i < base.Q.size(); ++i) {
      rep.max_shift_error = std::max(rep.max_shift_error, std::abs(shaped.Q[i] - base.Q[i]));
    }
    if (!rep.policy_sets_equal) {
      res.found = true;
      res.bonus = std::move(bonus);
      res.report = rep;
      return res;
    }
  }
  return res;
}

CenteringReport centering_conflict_demo(const TabularMDP & m, const PotentialVector & phi, const CenteringSpec & spec)
{
  if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) throw ContractViolation("baseline rate must lie in [0, 1]");
  if (spec.horizon < 1 || spec.trajectories < 0 || spec.trajectory_length < 1) {
    throw ContractViolation("centering demo needs a positive horizon and trajectory length");
  }
  const TabularMDP shaped = shape_with_trd(m, phi);
  const auto opt = value_iteration(shaped, 1e-11);
  std::vector<int> policy;
  for (const auto & set : opt.policy) policy.push_back(set.front());
  const Lookahead look{shaped, policy, spec.beta};

  CenteringReport rep;
  Rng rng(spec.seed);
  const int nA = m.n_actions;
  std::vector<double> qu(static_cast<std::size_t>(nA));
  std::vector<double> qc(static_cast<std::size_t>(nA));
  for (int traj = 0; traj < spec.trajectories; ++traj) {
    int s = traj % m.n_states;
    double b = 0.0;
    for (int step = 0; step < spec.trajectory_length; ++step) {
      for (int a = 0; a < nA; ++a) {
        qu[static_cast<std::size_t>(a)] = look.value(s, a, b, spec.horizon, false);
        qc[static_cast<std::size_t>(a)] = look.value(s, a, b, spec.horizon, true);
      }
      ++rep.points_checked;
      bool ranking = false;
      for (int a1 = 0; a1 < nA; ++a1) {
        for (int a2 = a1 + 1; a2 < nA; ++a2) {
          const auto i1 = static_cast<std::size_t>(a1);
          const auto i2 = static_cast<std::size_t>(a2);
          if (sign_with_tol(qu[i1] - qu[i2]) != sign_with_tol(qc[i1] - qc[i2])) ranking = true;
        }
      }
      if (ranking) ++rep.ranking_divergences;
      if (greedy_sets(qu, 1, nA, kTieTolerance) != greedy_sets(qc, 1, nA, kTieTolerance)) ++rep.argmax_divergences;
      rep.max_baseline = std::max(rep.max_baseline, std::abs(b));

      // Walk on under the shaped optimal policy.
      const int a = policy[static_cast<std::size_t>(s)];
      const double u = rng.uniform();
      double cum = 0.0;
      int next = m.n_states - 1;
      for (int t = 0; t < m.n_states; ++t) {
        cum += shaped.p(s, a, t);
        if (u < cum) {
          next = t;
          break;
        }
      }
      b += spec.beta * (shaped.r(s, a, next) - b);
      s = next;
    }
  }
  return rep;
}

}  // namespace hdr
