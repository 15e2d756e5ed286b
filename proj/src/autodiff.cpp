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

#include "vmpo/autodiff.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmpo {

namespace {

using MatrixMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatrixMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::string shape_of(const TensorNode* n) { return Tensor::shape_string(n->data.shape()); }

[[noreturn]] void shape_error(OpKind kind, const std::string& detail) {
  throw std::invalid_argument(std::string(op_kind_name(kind)) +
                              ": incompatible shapes, " + detail);
}

// One element of a reduced-away last axis.
int last_dim(const Tensor& t, OpKind kind) {
  if (t.rank() < 1) shape_error(kind, "input " + Tensor::shape_string(t.shape()) + " has rank 0");
  return t.shape().back();
}

std::vector<int> drop_last_axis(const std::vector<int>& shape) {
  return std::vector<int>(shape.begin(), shape.end() - 1);
}

enum class BinaryForm { kSameShape, kScalarLeft, kScalarRight };

BinaryForm binary_form(OpKind kind, const TensorNode* a, const TensorNode* b) {
  if (a->data.same_shape(b->data)) return BinaryForm::kSameShape;
  if (a->data.size() == 1) return BinaryForm::kScalarLeft;
  if (b->data.size() == 1) return BinaryForm::kScalarRight;
  shape_error(kind, shape_of(a) + " vs " + shape_of(b));
}

void check_same_graph(OpKind kind, std::initializer_list<NodeRef> nodes) {
  const Graph* g = nullptr;
  for (NodeRef n : nodes) {
    if (n == nullptr) {
      throw std::invalid_argument(std::string(op_kind_name(kind)) + ": null input node");
    }
    if (g == nullptr) g = n->graph;
    if (n->graph != g) {
      throw std::invalid_argument(std::string(op_kind_name(kind)) +
                                  ": inputs belong to different graphs");
    }
  }
}

}  // namespace

const char* op_kind_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAffine: return "affine";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kNeg: return "neg";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kSquare: return "square";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kLogsumexp: return "logsumexp";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kMax: return "max";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kStopGradient: return "stop_gradient";
  }
  return "unknown";
}

NodeRef detail_make_node(Graph* g, OpKind kind, Tensor data,
                         std::vector<TensorNode*> parents) {
  auto node = std::make_unique<TensorNode>();
  node->data = std::move(data);
  node->kind = kind;
  node->parents = std::move(parents);
  node->graph = g;
  node->id = g->nodes_.size();
  if (kind != OpKind::kStopGradient) {
    for (const TensorNode* p : node->parents) {
      if (p->requires_grad) {
        node->requires_grad = true;
        break;
      }
    }
  }
  g->nodes_.push_back(std::move(node));
  return g->nodes_.back().get();
}

NodeRef Graph::leaf(Tensor value, bool requires_grad) {
  NodeRef n = detail_make_node(this, OpKind::kLeaf, std::move(value), {});
  n->requires_grad = requires_grad;
  return n;
}

void Graph::zero_grad() {
  for (auto& n : nodes_) {
    if (n->grad_ready) n->grad.fill(0.0);
  }
}

namespace kernels {

Tensor matmul(const Tensor& a, const Tensor& b) {
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  MatrixMap(out.data(), m, n) = ConstMatrixMap(a.data(), m, k) * ConstMatrixMap(b.data(), k, n);
  return out;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int m = x.rows(), k = x.cols(), n = w.cols();
  Tensor out({m, n});
  MatrixMap o(out.data(), m, n);
  o = ConstMatrixMap(x.data(), m, k) * ConstMatrixMap(w.data(), k, n);
  o.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data(), n);
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out(x.shape());
  for (std::int64_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

Tensor logsumexp_last(const Tensor& x) {
  const int last = x.shape().back();
  const std::int64_t rows = x.size() / last;
  Tensor out(drop_last_axis(x.shape()));
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * last;
    double m = row[0];
    for (int j = 1; j < last; ++j) m = std::max(m, row[j]);
    double acc = 0.0;
    for (int j = 0; j < last; ++j) acc += std::exp(row[j] - m);
    out[r] = m + std::log(acc);
  }
  return out;
}

Tensor softmax_last(const Tensor& x) {
  const int last = x.shape().back();
  const std::int64_t rows = x.size() / last;
  Tensor out(x.shape());
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * last;
    double* orow = out.data() + r * last;
    double m = row[0];
    for (int j = 1; j < last; ++j) m = std::max(m, row[j]);
    double acc = 0.0;
    for (int j = 0; j < last; ++j) {
      orow[j] = std::exp(row[j] - m);
      acc += orow[j];
    }
    for (int j = 0; j < last; ++j) orow[j] /= acc;
  }
  return out;
}

double softplus(double x) {
  // max(x, 0) + log(exp(x - m) + exp(-m)) stays finite for any input.
  const double m = std::max(x, 0.0);
  return m + std::log(std::exp(x - m) + std::exp(-m));
}

}  // namespace kernels

namespace ad {

namespace {

Tensor elementwise_binary(OpKind kind, BinaryForm form, const Tensor& a, const Tensor& b) {
  auto apply = [kind](double x, double y) {
    switch (kind) {
      case OpKind::kAdd: return x + y;
      case OpKind::kSub: return x - y;
      case OpKind::kMul: return x * y;
      case OpKind::kDiv: return x / y;
      case OpKind::kMax: return x >= y ? x : y;
      default: throw std::logic_error("elementwise_binary: bad kind");
    }
  };
  switch (form) {
    case BinaryForm::kSameShape: {
      Tensor out(a.shape());
      for (std::int64_t i = 0; i < a.size(); ++i) out[i] = apply(a[i], b[i]);
      return out;
    }
    case BinaryForm::kScalarLeft: {
      Tensor out(b.shape());
      const double s = a[0];
      for (std::int64_t i = 0; i < b.size(); ++i) out[i] = apply(s, b[i]);
      return out;
    }
    case BinaryForm::kScalarRight: {
      Tensor out(a.shape());
      const double s = b[0];
      for (std::int64_t i = 0; i < a.size(); ++i) out[i] = apply(a[i], s);
      return out;
    }
  }
  throw std::logic_error("elementwise_binary: bad form");
}

NodeRef binary_op(OpKind kind, NodeRef a, NodeRef b) {
  check_same_graph(kind, {a, b});
  BinaryForm form = binary_form(kind, a, b);
  return detail_make_node(a->graph, kind, elementwise_binary(kind, form, a->data, b->data),
                          {a, b});
}

NodeRef unary_op(OpKind kind, NodeRef x, double (*fn)(double)) {
  check_same_graph(kind, {x});
  Tensor out(x->data.shape());
  for (std::int64_t i = 0; i < x->data.size(); ++i) out[i] = fn(x->data[i]);
  return detail_make_node(x->graph, kind, std::move(out), {x});
}

}  // namespace

NodeRef matmul(NodeRef a, NodeRef b) {
  check_same_graph(OpKind::kMatmul, {a, b});
  if (a->data.rank() != 2 || b->data.rank() != 2 || a->data.cols() != b->data.rows()) {
    shape_error(OpKind::kMatmul, shape_of(a) + " x " + shape_of(b));
  }
  return detail_make_node(a->graph, OpKind::kMatmul, kernels::matmul(a->data, b->data), {a, b});
}

NodeRef affine(NodeRef x, NodeRef w, NodeRef b) {
  check_same_graph(OpKind::kAffine, {x, w, b});
  if (x->data.rank() != 2 || w->data.rank() != 2 || b->data.rank() != 1 ||
      x->data.cols() != w->data.rows() || b->data.shape()[0] != w->data.cols()) {
    shape_error(OpKind::kAffine,
                shape_of(x) + " x " + shape_of(w) + " + " + shape_of(b));
  }
  return detail_make_node(x->graph, OpKind::kAffine,
                          kernels::affine(x->data, w->data, b->data), {x, w, b});
}

NodeRef add(NodeRef a, NodeRef b) { return binary_op(OpKind::kAdd, a, b); }
NodeRef sub(NodeRef a, NodeRef b) { return binary_op(OpKind::kSub, a, b); }
NodeRef mul(NodeRef a, NodeRef b) { return binary_op(OpKind::kMul, a, b); }
NodeRef div(NodeRef a, NodeRef b) { return binary_op(OpKind::kDiv, a, b); }
NodeRef max(NodeRef a, NodeRef b) { return binary_op(OpKind::kMax, a, b); }

NodeRef neg(NodeRef x) {
  return unary_op(OpKind::kNeg, x, [](double v) { return -v; });
}
NodeRef exp(NodeRef x) {
  return unary_op(OpKind::kExp, x, [](double v) { return std::exp(v); });
}
NodeRef log(NodeRef x) {
  return unary_op(OpKind::kLog, x, [](double v) { return std::log(v); });
}
NodeRef tanh(NodeRef x) {
  return unary_op(OpKind::kTanh, x, [](double v) { return std::tanh(v); });
}
NodeRef relu(NodeRef x) {
  return unary_op(OpKind::kRelu, x, [](double v) { return v > 0.0 ? v : 0.0; });
}
NodeRef square(NodeRef x) {
  return unary_op(OpKind::kSquare, x, [](double v) { return v * v; });
}

NodeRef sum(NodeRef x, ReduceAxis axis) {
  check_same_graph(OpKind::kSum, {x});
  Tensor out;
  if (axis == ReduceAxis::kAll) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < x->data.size(); ++i) acc += x->data[i];
    out = Tensor::scalar(acc);
  } else {
    const int last = last_dim(x->data, OpKind::kSum);
    const std::int64_t rows = x->data.size() / last;
    out = Tensor(drop_last_axis(x->data.shape()));
    for (std::int64_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int j = 0; j < last; ++j) acc += x->data[r * last + j];
      out[r] = acc;
    }
  }
  NodeRef n = detail_make_node(x->graph, OpKind::kSum, std::move(out), {x});
  n->axis = axis;
  return n;
}

NodeRef mean(NodeRef x) {
  check_same_graph(OpKind::kMean, {x});
  if (x->data.size() == 0) shape_error(OpKind::kMean, "empty input");
  double acc = 0.0;
  for (std::int64_t i = 0; i < x->data.size(); ++i) acc += x->data[i];
  return detail_make_node(x->graph, OpKind::kMean,
                          Tensor::scalar(acc / static_cast<double>(x->data.size())), {x});
}

NodeRef logsumexp(NodeRef x) {
  check_same_graph(OpKind::kLogsumexp, {x});
  last_dim(x->data, OpKind::kLogsumexp);
  return detail_make_node(x->graph, OpKind::kLogsumexp, kernels::logsumexp_last(x->data), {x});
}

NodeRef softmax(NodeRef x) {
  check_same_graph(OpKind::kSoftmax, {x});
  last_dim(x->data, OpKind::kSoftmax);
  return detail_make_node(x->graph, OpKind::kSoftmax, kernels::softmax_last(x->data), {x});
}

NodeRef concat(NodeRef a, NodeRef b) {
  check_same_graph(OpKind::kConcat, {a, b});
  const auto& sa = a->data.shape();
  const auto& sb = b->data.shape();
  if (sa.empty() || sb.empty() || sa.size() != sb.size() ||
      !std::equal(sa.begin(), sa.end() - 1, sb.begin())) {
    shape_error(OpKind::kConcat, shape_of(a) + " | " + shape_of(b));
  }
  const int la = sa.back(), lb = sb.back();
  std::vector<int> shape = sa;
  shape.back() = la + lb;
  Tensor out(shape);
  const std::int64_t rows = a->data.size() / la;
  for (std::int64_t r = 0; r < rows; ++r) {
    for (int j = 0; j < la; ++j) out[r * (la + lb) + j] = a->data[r * la + j];
    for (int j = 0; j < lb; ++j) out[r * (la + lb) + la + j] = b->data[r * lb + j];
  }
  return detail_make_node(a->graph, OpKind::kConcat, std::move(out), {a, b});
}

NodeRef slice(NodeRef x, int start, int len) {
  check_same_graph(OpKind::kSlice, {x});
  const int last = last_dim(x->data, OpKind::kSlice);
  if (start < 0 || len <= 0 || start + len > last) {
    shape_error(OpKind::kSlice, "range [" + std::to_string(start) + ", " +
                                    std::to_string(start + len) + ") of " + shape_of(x));
  }
  std::vector<int> shape = x->data.shape();
  shape.back() = len;
  Tensor out(shape);
  const std::int64_t rows = x->data.size() / last;
  for (std::int64_t r = 0; r < rows; ++r) {
    for (int j = 0; j < len; ++j) out[r * len + j] = x->data[r * last + start + j];
  }
  NodeRef n = detail_make_node(x->graph, OpKind::kSlice, std::move(out), {x});
  n->slice_start = start;
  n->slice_len = len;
  return n;
}

NodeRef stop_gradient(NodeRef x) {
  check_same_graph(OpKind::kStopGradient, {x});
  return detail_make_node(x->graph, OpKind::kStopGradient, x->data, {x});
}

}  // namespace ad

namespace {

// Accumulates grad contributions from a binary node into its parents,
// reducing over the broadcast side when one operand is a scalar.
void accumulate_binary(TensorNode* n) {
  TensorNode* a = n->parents[0];
  TensorNode* b = n->parents[1];
  const BinaryForm form = binary_form(n->kind, a, b);
  const Tensor& g = n->grad;
  auto a_at = [&](std::int64_t i) {
    return form == BinaryForm::kScalarLeft ? a->data[0] : a->data[i];
  };
  auto b_at = [&](std::int64_t i) {
    return form == BinaryForm::kScalarRight ? b->data[0] : b->data[i];
  };
  auto add_to = [&](TensorNode* p, bool scalar_side, std::int64_t i, double v) {
    p->grad[scalar_side ? 0 : i] += v;
  };
  const bool a_scalar = form == BinaryForm::kScalarLeft;
  const bool b_scalar = form == BinaryForm::kScalarRight;
  const bool need_a = a->requires_grad;
  const bool need_b = b->requires_grad;
  if (need_a) a->ensure_grad();
  if (need_b) b->ensure_grad();
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double gi = g[i];
    switch (n->kind) {
      case OpKind::kAdd:
        if (need_a) add_to(a, a_scalar, i, gi);
        if (need_b) add_to(b, b_scalar, i, gi);
        break;
      case OpKind::kSub:
        if (need_a) add_to(a, a_scalar, i, gi);
        if (need_b) add_to(b, b_scalar, i, -gi);
        break;
      case OpKind::kMul:
        if (need_a) add_to(a, a_scalar, i, gi * b_at(i));
        if (need_b) add_to(b, b_scalar, i, gi * a_at(i));
        break;
      case OpKind::kDiv: {
        const double bv = b_at(i);
        if (need_a) add_to(a, a_scalar, i, gi / bv);
        if (need_b) add_to(b, b_scalar, i, -gi * a_at(i) / (bv * bv));
        break;
      }
      case OpKind::kMax: {
        const bool left = a_at(i) >= b_at(i);
        if (left) {
          if (need_a) add_to(a, a_scalar, i, gi);
        } else {
          if (need_b) add_to(b, b_scalar, i, gi);
        }
        break;
      }
      default:
        throw std::logic_error("accumulate_binary: bad kind");
    }
  }
}

void accumulate_parents(TensorNode* n) {
  switch (n->kind) {
    case OpKind::kLeaf:
    case OpKind::kStopGradient:
      return;
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kDiv:
    case OpKind::kMax:
      accumulate_binary(n);
      return;
    case OpKind::kMatmul: {
      TensorNode* a = n->parents[0];
      TensorNode* b = n->parents[1];
      const int m = a->data.rows(), k = a->data.cols(), nn = b->data.cols();
      ConstMatrixMap gc(n->grad.data(), m, nn);
      if (a->requires_grad) {
        a->ensure_grad();
        MatrixMap(a->grad.data(), m, k).noalias() +=
            gc * ConstMatrixMap(b->data.data(), k, nn).transpose();
      }
      if (b->requires_grad) {
        b->ensure_grad();
        MatrixMap(b->grad.data(), k, nn).noalias() +=
            ConstMatrixMap(a->data.data(), m, k).transpose() * gc;
      }
      return;
    }
    case OpKind::kAffine: {
      TensorNode* x = n->parents[0];
      TensorNode* w = n->parents[1];
      TensorNode* b = n->parents[2];
      const int m = x->data.rows(), k = x->data.cols(), nn = w->data.cols();
      ConstMatrixMap gy(n->grad.data(), m, nn);
      if (x->requires_grad) {
        x->ensure_grad();
        MatrixMap(x->grad.data(), m, k).noalias() +=
            gy * ConstMatrixMap(w->data.data(), k, nn).transpose();
      }
      if (w->requires_grad) {
        w->ensure_grad();
        MatrixMap(w->grad.data(), k, nn).noalias() +=
            ConstMatrixMap(x->data.data(), m, k).transpose() * gy;
      }
      if (b->requires_grad) {
        b->ensure_grad();
        Eigen::Map<Eigen::RowVectorXd>(b->grad.data(), nn) += gy.colwise().sum();
      }
      return;
    }
    case OpKind::kNeg: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) x->grad[i] -= n->grad[i];
      return;
    }
    case OpKind::kExp: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) x->grad[i] += n->grad[i] * n->data[i];
      return;
    }
    case OpKind::kLog: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) x->grad[i] += n->grad[i] / x->data[i];
      return;
    }
    case OpKind::kTanh: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) {
        x->grad[i] += n->grad[i] * (1.0 - n->data[i] * n->data[i]);
      }
      return;
    }
    case OpKind::kRelu: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) {
        if (x->data[i] > 0.0) x->grad[i] += n->grad[i];
      }
      return;
    }
    case OpKind::kSquare: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      for (std::int64_t i = 0; i < n->grad.size(); ++i) {
        x->grad[i] += 2.0 * x->data[i] * n->grad[i];
      }
      return;
    }
    case OpKind::kSum: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      if (n->axis == ReduceAxis::kAll) {
        const double g = n->grad[0];
        for (std::int64_t i = 0; i < x->data.size(); ++i) x->grad[i] += g;
      } else {
        const int last = x->data.shape().back();
        const std::int64_t rows = x->data.size() / last;
        for (std::int64_t r = 0; r < rows; ++r) {
          const double g = n->grad[r];
          for (int j = 0; j < last; ++j) x->grad[r * last + j] += g;
        }
      }
      return;
    }
    case OpKind::kMean: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      const double g = n->grad[0] / static_cast<double>(x->data.size());
      for (std::int64_t i = 0; i < x->data.size(); ++i) x->grad[i] += g;
      return;
    }
    case OpKind::kLogsumexp: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      const int last = x->data.shape().back();
      const std::int64_t rows = x->data.size() / last;
      for (std::int64_t r = 0; r < rows; ++r) {
        const double g = n->grad[r];
        const double lse = n->data[r];
        for (int j = 0; j < last; ++j) {
          x->grad[r * last + j] += g * std::exp(x->data[r * last + j] - lse);
        }
      }
      return;
    }
    case OpKind::kSoftmax: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      const int last = x->data.shape().back();
      const std::int64_t rows = x->data.size() / last;
      for (std::int64_t r = 0; r < rows; ++r) {
        double dot = 0.0;
        for (int j = 0; j < last; ++j) dot += n->grad[r * last + j] * n->data[r * last + j];
        for (int j = 0; j < last; ++j) {
          x->grad[r * last + j] += n->data[r * last + j] * (n->grad[r * last + j] - dot);
        }
      }
      return;
    }
    case OpKind::kConcat: {
      TensorNode* a = n->parents[0];
      TensorNode* b = n->parents[1];
      const int la = a->data.shape().back();
      const int lb = b->data.shape().back();
      const std::int64_t rows = a->data.size() / la;
      if (a->requires_grad) {
        a->ensure_grad();
        for (std::int64_t r = 0; r < rows; ++r) {
          for (int j = 0; j < la; ++j) a->grad[r * la + j] += n->grad[r * (la + lb) + j];
        }
      }
      if (b->requires_grad) {
        b->ensure_grad();
        for (std::int64_t r = 0; r < rows; ++r) {
          for (int j = 0; j < lb; ++j) b->grad[r * lb + j] += n->grad[r * (la + lb) + la + j];
        }
      }
      return;
    }
    case OpKind::kSlice: {
      TensorNode* x = n->parents[0];
      x->ensure_grad();
      const int last = x->data.shape().back();
      const std::int64_t rows = x->data.size() / last;
      for (std::int64_t r = 0; r < rows; ++r) {
        for (int j = 0; j < n->slice_len; ++j) {
          x->grad[r * last + n->slice_start + j] += n->grad[r * n->slice_len + j];
        }
      }
      return;
    }
  }
}

}  // namespace

void Graph::backward(NodeRef loss) {
  if (loss == nullptr || loss->graph != this) {
    throw std::invalid_argument("backward: loss does not belong to this graph");
  }
  if (loss->data.size() != 1) {
    throw std::invalid_argument("backward: loss has shape " +
                                Tensor::shape_string(loss->data.shape()) +
                                ", expected a scalar");
  }
  if (!loss->requires_grad) return;

  // Mark the subgraph that feeds the loss through differentiable paths.
  std::vector<bool> needed(nodes_.size(), false);
  std::vector<TensorNode*> stack = {loss};
  needed[loss->id] = true;
  while (!stack.empty()) {
    TensorNode* n = stack.back();
    stack.pop_back();
    if (n->kind == OpKind::kStopGradient) continue;
    for (TensorNode* p : n->parents) {
      if (p->requires_grad && !needed[p->id]) {
        needed[p->id] = true;
        stack.push_back(p);
      }
    }
  }

  // Interior grads are scratch space for this pass; only leaves accumulate
  // across backward calls.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    TensorNode* n = nodes_[i].get();
    if (needed[i] && n->kind != OpKind::kLeaf) {
      n->ensure_grad();
      n->grad.fill(0.0);
    }
  }

  loss->ensure_grad();
  loss->grad[0] += 1.0;

  // Reverse creation order is a topological order of the tape; sweeping it
  // gives a fixed accumulation order and hence bit-reproducible gradients.
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    TensorNode* n = nodes_[i].get();
    if (!needed[n->id] || n->kind == OpKind::kLeaf) continue;
    accumulate_parents(n);
  }
}

}  // namespace vmpo
