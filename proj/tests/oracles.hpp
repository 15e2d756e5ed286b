// Copyright 2026 The vmpo Authors
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

// Test-only reference implementations, independent of the library code
// paths they are used to check.

#ifndef VMPO_TESTS_ORACLES_HPP_
#define VMPO_TESTS_ORACLES_HPP_

#include <array>
#include <functional>
#include <vector>

#include "vmpo/distributions.hpp"
#include "vmpo/rng.hpp"

namespace vmpo::oracles {

// ---- Chain MDP -------------------------------------------------------------
// Hand-coded transition model of the corridor task: states 0..L-1, start 0,
// right entry into L-1 pays `right_reward` and terminates, a left push at 0
// pays `left_reward` and terminates, actions flip with probability `slip`.

struct ChainValueIteration {
  std::vector<double> values;        // per non-terminal state
  std::vector<double> q_left;
  std::vector<double> q_right;
  double bellman_residual = 0.0;
  int iterations = 0;
};

ChainValueIteration chain_value_iteration(int length, double slip, double gamma,
                                          double tol = 1e-13, int max_iters = 1000000);

// Optimal expected undiscounted return from the start state under the
// episode cap, by finite-horizon dynamic programming.
double chain_optimal_return(int length, double slip, int horizon);

// ---- Discrete-time LQR (point mass) ----------------------------------------
// Per-dimension double integrator z' = A z + B u with A=[[1,dt],[0,1]],
// B=[0,dt]^T and per-step cost x^2 + 0.1 u^2. Finite-horizon Riccati
// recursion with zero terminal cost; gains are time varying.

struct LqrSolution {
  std::vector<std::array<double, 2>> gains;  // u_t = -(k0 x + k1 v), per step
  double dt = 0.0;

  double action(int t, double position, double velocity) const {
    const auto& k = gains[t];
    return -(k[0] * position + k[1] * velocity);
  }
};

LqrSolution lqr_solve(double dt, int horizon, double action_cost = 0.1);

// ---- Numeric integration ----------------------------------------------------

// KL(N(m1,s1^2) || N(m2,s2^2)) by Simpson quadrature of p1 log(p1/p2).
double gaussian_kl_quadrature(double m1, double s1, double m2, double s2,
                              int intervals = 200000);

// Exact KL between diagonal Gaussians (quadratic term under the second
// argument's covariance).
double gaussian_kl_exact(const DiagGaussianParams& p, const DiagGaussianParams& q);

// ---- Scalar minimization -----------------------------------------------------

// Golden-section minimum of a unimodal function on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-12, int max_iters = 400);

// ---- Cart-pole dynamics ------------------------------------------------------

// One explicit Euler step of the classic cart-pole physics, written out
// independently of the environment implementation.
std::array<double, 4> cartpole_euler_step(const std::array<double, 4>& state, double force);

// ---- Empirical Fisher --------------------------------------------------------

// F = E[score score^T] estimated from `samples` draws; `draw_score` fills
// the score vector of one fresh sample. Row-major n x n.
std::vector<double> empirical_fisher(
    int n, const std::function<void(RngEngine&, std::vector<double>&)>& draw_score,
    long samples, RngEngine& rng);

double quadratic_form(const std::vector<double>& matrix, const std::vector<double>& v);

}  // namespace vmpo::oracles

#endif  // VMPO_TESTS_ORACLES_HPP_
