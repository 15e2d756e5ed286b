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

#include "vmpo/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace vmpo {

AdamState AdamState::init(std::size_t size) {
  AdamState s;
  s.m.assign(size, 0.0);
  s.v.assign(size, 0.0);
  return s;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate, const ParameterStore* layout) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  if (learning_rate <= 0.0) throw std::invalid_argument("adam_step: learning rate must be positive");

  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      const std::string name =
          layout ? layout->name_of_coordinate(i) : "coordinate " + std::to_string(i);
      throw std::runtime_error("adam_step: non-finite gradient for " + name);
    }
  }

  state.step += 1;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace vmpo
