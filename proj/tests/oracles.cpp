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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmpo::oracles {

namespace {

constexpr double kLeftReward = 0.01;
constexpr double kRightReward = 1.0;

struct Outcome {
  int next = 0;        // ignored when done
  double reward = 0.0;
  bool done = false;
};

// Executed-action effect in the corridor; mirrors the documented task, not
// the environment code.
Outcome chain_effect(int length, int state, int executed) {
  Outcome o;
  if (executed == 1) {
    if (state + 1 == length - 1) {
      o.reward = kRightReward;
      o.done = true;
    } else {
      o.next = state + 1;
    }
  } else {
    if (state == 0) {
      o.reward = kLeftReward;
      o.done = true;
    } else {
      o.next = state - 1;
    }
  }
  return o;
}

double backup(int length, double slip, int state, int intended,
              const std::function<double(const Outcome&)>& value_of) {
  const Outcome keep = chain_effect(length, state, intended);
  const Outcome flip = chain_effect(length, state, 1 - intended);
  return (1.0 - slip) * value_of(keep) + slip * value_of(flip);
}

}  // namespace

ChainValueIteration chain_value_iteration(int length, double slip, double gamma, double tol,
                                          int max_iters) {
  const int n = length - 1;  // non-terminal states 0..L-2
  ChainValueIteration vi;
  vi.values.assign(n, 0.0);
  vi.q_left.assign(n, 0.0);
  vi.q_right.assign(n, 0.0);
  for (vi.iterations = 0; vi.iterations < max_iters; ++vi.iterations) {
    double residual = 0.0;
    std::vector<double> next(n);
    for (int s = 0; s < n; ++s) {
      auto value_of = [&](const Outcome& o) {
        return o.reward + (o.done ? 0.0 : gamma * vi.values[o.next]);
      };
      vi.q_left[s] = backup(length, slip, s, 0, value_of);
      vi.q_right[s] = backup(length, slip, s, 1, value_of);
      next[s] = std::max(vi.q_left[s], vi.q_right[s]);
      residual = std::max(residual, std::abs(next[s] - vi.values[s]));
    }
    vi.values = next;
    vi.bellman_residual = residual;
    if (residual < tol) break;
  }
  return vi;
}

double chain_optimal_return(int length, double slip, int horizon) {
  const int n = length - 1;
  // f[s] = optimal expected undiscounted return with t steps remaining.
  std::vector<double> f(n, 0.0);
  for (int t = 1; t <= horizon; ++t) {
    std::vector<double> next(n);
    for (int s = 0; s < n; ++s) {
      auto value_of = [&](const Outcome& o) {
        return o.reward + (o.done ? 0.0 : f[o.next]);
      };
      next[s] = std::max(backup(length, slip, s, 0, value_of),
                         backup(length, slip, s, 1, value_of));
    }
    f = next;
  }
  return f[0];
}

LqrSolution lqr_solve(double dt, int horizon, double action_cost) {
  // P is symmetric 2x2: [p00 p01; p01 p11]; zero terminal cost.
  double p00 = 0.0, p01 = 0.0, p11 = 0.0;
  const double a00 = 1.0, a01 = dt, a10 = 0.0, a11 = 1.0;
  const double b0 = 0.0, b1 = dt;
  LqrSolution sol;
  sol.dt = dt;
  sol.gains.assign(horizon, {0.0, 0.0});
  for (int t = horizon - 1; t >= 0; --t) {
    // K = (R + B'PB)^-1 B'PA
    const double bpb = b0 * (p00 * b0 + p01 * b1) + b1 * (p01 * b0 + p11 * b1);
    const double bpa0 = b0 * (p00 * a00 + p01 * a10) + b1 * (p01 * a00 + p11 * a10);
    const double bpa1 = b0 * (p00 * a01 + p01 * a11) + b1 * (p01 * a01 + p11 * a11);
    const double inv = 1.0 / (action_cost + bpb);
    const double k0 = inv * bpa0;
    const double k1 = inv * bpa1;
    sol.gains[t] = {k0, k1};
    // P = Q + K'RK + (A - BK)' P (A - BK)
    const double c00 = a00 - b0 * k0, c01 = a01 - b0 * k1;
    const double c10 = a10 - b1 * k0, c11 = a11 - b1 * k1;
    const double pc00 = p00 * c00 + p01 * c10, pc01 = p00 * c01 + p01 * c11;
    const double pc10 = p01 * c00 + p11 * c10, pc11 = p01 * c01 + p11 * c11;
    const double n00 = c00 * pc00 + c10 * pc10;
    const double n01 = c00 * pc01 + c10 * pc11;
    const double n11 = c01 * pc01 + c11 * pc11;
    p00 = 1.0 + action_cost * k0 * k0 + n00;
    p01 = action_cost * k0 * k1 + n01;
    p11 = action_cost * k1 * k1 + n11;
  }
  return sol;
}

double gaussian_kl_quadrature(double m1, double s1, double m2, double s2, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double lo = m1 - 14.0 * s1;
  const double hi = m1 + 14.0 * s1;
  const double h = (hi - lo) / intervals;
  auto log_pdf = [](double x, double m, double s) {
    const double z = (x - m) / s;
    return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * 3.14159265358979323846);
  };
  auto integrand = [&](double x) {
    const double lp1 = log_pdf(x, m1, s1);
    return std::exp(lp1) * (lp1 - log_pdf(x, m2, s2));
  };
  double acc = integrand(lo) + integrand(hi);
  for (int i = 1; i < intervals; ++i) {
    acc += integrand(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

double gaussian_kl_exact(const DiagGaussianParams& p, const DiagGaussianParams& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.mean.size(); ++i) {
    const double r = p.stddev[i] / q.stddev[i];
    const double d = (p.mean[i] - q.mean[i]) / q.stddev[i];
    kl += 0.5 * (r * r + d * d - 1.0) - std::log(r);
  }
  return kl;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol, int max_iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iters && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::array<double, 4> cartpole_euler_step(const std::array<double, 4>& state, double force) {
  const double gravity = 9.8, mass_cart = 1.0, mass_pole = 0.1, half_len = 0.5, tau = 0.02;
  const double total = mass_cart + mass_pole;
  const double pml = mass_pole * half_len;
  const double x = state[0], xd = state[1], th = state[2], thd = state[3];
  const double cs = std::cos(th), sn = std::sin(th);
  const double tmp = (force + pml * thd * thd * sn) / total;
  const double th_acc = (gravity * sn - cs * tmp) / (half_len * (4.0 / 3.0 - mass_pole * cs * cs / total));
  const double x_acc = tmp - pml * th_acc * cs / total;
  return {x + tau * xd, xd + tau * x_acc, th + tau * thd, thd + tau * th_acc};
}

std::vector<double> empirical_fisher(
    int n, const std::function<void(RngEngine&, std::vector<double>&)>& draw_score,
    long samples, RngEngine& rng) {
  std::vector<double> fisher(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> score(n);
  for (long s = 0; s < samples; ++s) {
    draw_score(rng, score);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        fisher[static_cast<std::size_t>(i) * n + j] += score[i] * score[j];
      }
    }
  }
  for (double& x : fisher) x /= static_cast<double>(samples);
  return fisher;
}

double quadratic_form(const std::vector<double>& matrix, const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (matrix.size() != n * n) throw std::invalid_argument("quadratic_form: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) acc += v[i] * matrix[i * n + j] * v[j];
  }
  return acc;
}

}  // namespace vmpo::oracles
