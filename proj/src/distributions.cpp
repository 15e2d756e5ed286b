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

#include "vmpo/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmpo {

namespace {

constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454836;  // 0.5*log(2*pi)

double logsumexp(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

void check_gaussian_pair(const DiagGaussianParams& a, const DiagGaussianParams& b) {
  if (a.mean.size() != a.stddev.size() || b.mean.size() != b.stddev.size() ||
      a.mean.size() != b.mean.size()) {
    throw std::invalid_argument("gaussian KL: dimension mismatch");
  }
}

}  // namespace

double log_prob(const CategoricalParams& dist, int action) {
  const int n = static_cast<int>(dist.logits.size());
  if (action < 0 || action >= n) {
    throw std::invalid_argument("log_prob: action " + std::to_string(action) +
                                " outside categorical support of size " + std::to_string(n));
  }
  return dist.logits[action] - logsumexp(dist.logits);
}

double log_prob(const DiagGaussianParams& dist, std::span<const double> action) {
  if (action.size() != dist.mean.size()) {
    throw std::invalid_argument("log_prob: action dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double z = (action[i] - dist.mean[i]) / dist.stddev[i];
    lp += -0.5 * z * z - std::log(dist.stddev[i]) - kHalfLog2Pi;
  }
  return lp;
}

int sample(const CategoricalParams& dist, RngEngine& rng) {
  const double lse = logsumexp(dist.logits);
  const double u = draw_uniform(rng, 0.0, 1.0);
  double cum = 0.0;
  const int n = static_cast<int>(dist.logits.size());
  for (int a = 0; a < n; ++a) {
    cum += std::exp(dist.logits[a] - lse);
    if (u < cum) return a;
  }
  return n - 1;
}

std::vector<double> sample(const DiagGaussianParams& dist, RngEngine& rng) {
  std::vector<double> a(dist.mean.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = dist.mean[i] + dist.stddev[i] * draw_normal(rng);
  }
  return a;
}

int mode(const CategoricalParams& dist) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(dist.logits.size()); ++a) {
    if (dist.logits[a] > dist.logits[best]) best = a;
  }
  return best;
}

std::vector<double> mode(const DiagGaussianParams& dist) { return dist.mean; }

double kl_categorical(const CategoricalParams& old_dist, const CategoricalParams& new_dist) {
  if (old_dist.logits.size() != new_dist.logits.size()) {
    throw std::invalid_argument("kl_categorical: action count mismatch");
  }
  const double lse_old = logsumexp(old_dist.logits);
  const double lse_new = logsumexp(new_dist.logits);
  double kl = 0.0;
  for (std::size_t a = 0; a < old_dist.logits.size(); ++a) {
    const double lp_old = old_dist.logits[a] - lse_old;
    const double lp_new = new_dist.logits[a] - lse_new;
    kl += std::exp(lp_old) * (lp_old - lp_new);
  }
  return kl;
}

double kl_gaussian_mean(const DiagGaussianParams& old_dist,
                        const DiagGaussianParams& new_dist) {
  check_gaussian_pair(old_dist, new_dist);
  double kl = 0.0;
  for (std::size_t i = 0; i < old_dist.mean.size(); ++i) {
    const double d = new_dist.mean[i] - old_dist.mean[i];
    kl += 0.5 * d * d / (old_dist.stddev[i] * old_dist.stddev[i]);
  }
  return kl;
}

double kl_gaussian_cov(const DiagGaussianParams& old_dist,
                       const DiagGaussianParams& new_dist) {
  check_gaussian_pair(old_dist, new_dist);
  double kl = 0.0;
  for (std::size_t i = 0; i < old_dist.stddev.size(); ++i) {
    const double ratio = old_dist.stddev[i] / new_dist.stddev[i];
    kl += 0.5 * (ratio * ratio - 1.0) - std::log(ratio);
  }
  return kl;
}

double kl_gaussian_total(const DiagGaussianParams& old_dist,
                         const DiagGaussianParams& new_dist) {
  return kl_gaussian_mean(old_dist, new_dist) + kl_gaussian_cov(old_dist, new_dist);
}

}  // namespace vmpo
