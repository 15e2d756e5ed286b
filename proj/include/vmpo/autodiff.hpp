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

#ifndef VMPO_AUTODIFF_HPP_
#define VMPO_AUTODIFF_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vmpo/tensor.hpp"

namespace vmpo {

enum class OpKind {
  kLeaf,
  kMatmul,
  kAffine,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kExp,
  kLog,
  kTanh,
  kRelu,
  kSquare,
  kSum,
  kMean,
  kLogsumexp,
  kSoftmax,
  kMax,
  kConcat,
  kSlice,
  kStopGradient,
};

const char* op_kind_name(OpKind kind);

// Reduction extent for sum/mean. logsumexp and softmax always act on the
// last axis.
enum class ReduceAxis { kAll, kLast };

class Graph;

struct TensorNode {
  Tensor data;
  Tensor grad;  // allocated on first backward pass through this node
  bool requires_grad = false;
  bool grad_ready = false;
  OpKind kind = OpKind::kLeaf;
  std::vector<TensorNode*> parents;
  std::uint64_t id = 0;
  Graph* graph = nullptr;

  // Op attributes.
  ReduceAxis axis = ReduceAxis::kAll;
  int slice_start = 0;
  int slice_len = 0;

  void ensure_grad() {
    if (!grad_ready) {
      grad = Tensor::zeros(data.shape());
      grad_ready = true;
    }
  }
};

using NodeRef = TensorNode*;

// Owns every node of one differentiation tape. Nodes are created in program
// order; the reverse of that order is the topological order used by
// backward(), so gradient accumulation is deterministic run to run.
// Single-threaded per graph; distinct graphs are independent.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  NodeRef leaf(Tensor value, bool requires_grad = true);
  NodeRef constant(Tensor value) { return leaf(std::move(value), false); }
  NodeRef constant(double value) { return leaf(Tensor::scalar(value), false); }

  // Accumulates d(loss)/d(node) into node->grad for every node that
  // requires gradients. loss must be a single-element tensor.
  void backward(NodeRef loss);

  void zero_grad();

  std::size_t node_count() const { return nodes_.size(); }

 private:
  friend NodeRef detail_make_node(Graph* g, OpKind kind, Tensor data,
                                  std::vector<TensorNode*> parents);

  std::vector<std::unique_ptr<TensorNode>> nodes_;
};

namespace ad {

NodeRef matmul(NodeRef a, NodeRef b);
// x*w + row-broadcast bias; the one broadcasting form in the library.
NodeRef affine(NodeRef x, NodeRef w, NodeRef b);

// Elementwise binaries; operands must have identical shapes, except that
// either side may be a single-element tensor, which is applied across the
// other operand.
NodeRef add(NodeRef a, NodeRef b);
NodeRef sub(NodeRef a, NodeRef b);
NodeRef mul(NodeRef a, NodeRef b);
NodeRef div(NodeRef a, NodeRef b);
// Elementwise maximum; ties route the gradient to the first operand.
NodeRef max(NodeRef a, NodeRef b);

NodeRef neg(NodeRef x);
NodeRef exp(NodeRef x);
NodeRef log(NodeRef x);
NodeRef tanh(NodeRef x);
NodeRef relu(NodeRef x);
NodeRef square(NodeRef x);

NodeRef sum(NodeRef x, ReduceAxis axis = ReduceAxis::kAll);
NodeRef mean(NodeRef x);
// Overflow-safe log-sum-exp over the last axis; a vector reduces to a scalar.
NodeRef logsumexp(NodeRef x);
// Softmax over the last axis.
NodeRef softmax(NodeRef x);

// Joins/splits along the last axis.
NodeRef concat(NodeRef a, NodeRef b);
NodeRef slice(NodeRef x, int start, int len);

// Copies the value and blocks all gradient flow through it.
NodeRef stop_gradient(NodeRef x);

}  // namespace ad

// Raw forward kernels shared by the graph ops and by graph-free evaluation
// paths (acting, evaluation). Callers are responsible for valid shapes.
namespace kernels {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor tanh(const Tensor& x);
Tensor softmax_last(const Tensor& x);
Tensor logsumexp_last(const Tensor& x);
double softplus(double x);

}  // namespace kernels

}  // namespace vmpo

#endif  // VMPO_AUTODIFF_HPP_
