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

#ifndef VMPO_GRAD_CHECK_HPP_
#define VMPO_GRAD_CHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "vmpo/autodiff.hpp"
#include "vmpo/param_store.hpp"

namespace vmpo {

// A scalar-valued tensor program over leaves created from a ParameterStore,
// one leaf per store entry in registration order.
using TensorProgram =
    std::function<NodeRef(Graph& graph, const std::vector<NodeRef>& leaves)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_coordinate = 0;
  std::string worst_name;
};

// Compares reverse-mode gradients against central finite differences at the
// given point. Error per coordinate is |analytic - fd| / max(1, |analytic|).
// Throws if any probed loss value is non-finite, naming the coordinate.
GradCheckResult grad_check(const TensorProgram& program, const ParameterStore& point,
                           double step);

}  // namespace vmpo

#endif  // VMPO_GRAD_CHECK_HPP_
