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

#ifndef VMPO_ADAM_HPP_
#define VMPO_ADAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vmpo/param_store.hpp"

namespace vmpo {

// Adam moments with decay 0.9/0.999 and stability constant 1e-7, bias
// corrected by the step count.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  static AdamState init(std::size_t size);
};

// One update in place. Throws on a non-finite gradient, naming the offending
// parameter when a store describing the layout is given.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate, const ParameterStore* layout = nullptr);

}  // namespace vmpo

#endif  // VMPO_ADAM_HPP_
