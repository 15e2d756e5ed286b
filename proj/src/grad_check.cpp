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

#include "vmpo/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace vmpo {

namespace {

std::vector<NodeRef> make_leaves(Graph& g, const ParameterStore& point) {
  std::vector<NodeRef> leaves;
  leaves.reserve(point.entry_count());
  for (std::size_t i = 0; i < point.entry_count(); ++i) {
    leaves.push_back(g.leaf(point.tensor(i), /*requires_grad=*/true));
  }
  return leaves;
}

double eval_loss(const TensorProgram& program, const ParameterStore& point) {
  Graph g;
  std::vector<NodeRef> leaves = make_leaves(g, point);
  NodeRef loss = program(g, leaves);
  return loss->data.value();
}

}  // namespace

GradCheckResult grad_check(const TensorProgram& program, const ParameterStore& point,
                           double step) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");

  // Analytic gradient at the point.
  std::vector<double> analytic(point.flat_size(), 0.0);
  {
    Graph g;
    std::vector<NodeRef> leaves = make_leaves(g, point);
    NodeRef loss = program(g, leaves);
    if (!std::isfinite(loss->data.value())) {
      throw std::runtime_error("grad_check: non-finite loss at the base point");
    }
    g.backward(loss);
    std::size_t k = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const NodeRef leaf = leaves[i];
      for (std::int64_t j = 0; j < leaf->data.size(); ++j) {
        analytic[k++] = leaf->grad_ready ? leaf->grad[j] : 0.0;
      }
    }
  }

  ParameterStore probe = point;
  GradCheckResult result;
  for (std::size_t c = 0; c < probe.flat_size(); ++c) {
    const double saved = probe.flat()[c];
    probe.flat()[c] = saved + step;
    const double plus = eval_loss(program, probe);
    probe.flat()[c] = saved - step;
    const double minus = eval_loss(program, probe);
    probe.flat()[c] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw std::runtime_error("grad_check: non-finite loss while probing coordinate " +
                               probe.name_of_coordinate(c));
    }
    const double fd = (plus - minus) / (2.0 * step);
    const double err = std::abs(analytic[c] - fd) / std::max(1.0, std::abs(analytic[c]));
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_coordinate = c;
      result.worst_name = probe.name_of_coordinate(c);
    }
  }
  return result;
}

}  // namespace vmpo
