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

#ifndef VMPO_DISTRIBUTIONS_HPP_
#define VMPO_DISTRIBUTIONS_HPP_

#include <span>
#include <variant>
#include <vector>

#include "vmpo/rng.hpp"

namespace vmpo {

struct CategoricalParams {
  std::vector<double> logits;
};

struct DiagGaussianParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // strictly positive per dimension
};

using PolicyParams = std::variant<CategoricalParams, DiagGaussianParams>;

// Log-probabilities are computed fully in log space.
double log_prob(const CategoricalParams& dist, int action);
double log_prob(const DiagGaussianParams& dist, std::span<const double> action);

int sample(const CategoricalParams& dist, RngEngine& rng);
std::vector<double> sample(const DiagGaussianParams& dist, RngEngine& rng);

// Highest-probability action; ties break toward the lower index.
int mode(const CategoricalParams& dist);
// Mean action.
std::vector<double> mode(const DiagGaussianParams& dist);

// D_KL(old || new) for categoricals over the same action count.
double kl_categorical(const CategoricalParams& old_dist, const CategoricalParams& new_dist);

// Decoupled Gaussian divergences used by the trust-region losses: the mean
// component measures the mean shift in the metric of the old covariance and
// is independent of the new stddev; the covariance component ignores means.
double kl_gaussian_mean(const DiagGaussianParams& old_dist,
                        const DiagGaussianParams& new_dist);
double kl_gaussian_cov(const DiagGaussianParams& old_dist,
                       const DiagGaussianParams& new_dist);
// Sum of the two components above; exactly kl_gaussian_mean + kl_gaussian_cov.
double kl_gaussian_total(const DiagGaussianParams& old_dist,
                         const DiagGaussianParams& new_dist);

}  // namespace vmpo

#endif  // VMPO_DISTRIBUTIONS_HPP_
