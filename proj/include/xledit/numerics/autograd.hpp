// Copyright 2026 The xledit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Tape-free reverse-mode differentiation. Every op result keeps shared
// pointers to its inputs and a closure that pushes its gradient back into
// them; backward() walks the graph in reverse topological order. Results of
// ops whose inputs are all constants are themselves constants and record
// nothing, so inference runs the same code without building a graph.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xledit/numerics/tensor.hpp"

namespace xledit::num {

using NodeId = std::uint64_t;

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // empty until something flows into it
  bool requires_grad = false;
  NodeId id = 0;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Tensor<T>& ensure_grad() {
    if (grad.empty() && !value.empty()) grad = Tensor<T>(value.shape());
    if (grad.shape() != value.shape()) grad = Tensor<T>(value.shape());
    return grad;
  }
};

NodeId next_node_id();

/// Handle to a graph node. Copies share the node.
template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> n) : node_(std::move(n)) {}

  /// Leaf holding `value`. Parameters pass requires_grad = true.
  static Var leaf(Tensor<T> value, bool requires_grad = false) {
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->id = next_node_id();
    return Var(std::move(n));
  }
  static Var constant(Tensor<T> value) { return leaf(std::move(value), false); }

  bool valid() const { return static_cast<bool>(node_); }
  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() const { return node_->value; }
  const Tensor<T>& grad() const { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  NodeId id() const { return node_->id; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  T item() const { return node_->value.item(); }

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Builds the result node of an op. When no input requires a gradient the
/// closure and inputs are dropped and the result is a constant.
template <typename T>
Var<T> make_result(Tensor<T> value, std::vector<Var<T>> inputs,
                   std::function<void(Node<T>&)> backward) {
  bool needs = false;
  for (const auto& in : inputs) needs = needs || in.requires_grad();
  auto n = std::make_shared<Node<T>>();
  n->value = std::move(value);
  n->id = next_node_id();
  if (needs) {
    n->requires_grad = true;
    n->inputs.reserve(inputs.size());
    for (auto& in : inputs) n->inputs.push_back(in.shared());
    n->backward = std::move(backward);
  }
  return Var<T>(std::move(n));
}

/// Parameter id -> gradient, for every requires_grad leaf reachable from the
/// loss.
template <typename T>
using GradMap = std::unordered_map<NodeId, Tensor<T>>;

/// Reverse pass from a scalar loss. Throws ContractError for a non-scalar
/// loss. Leaf gradients are moved into the returned map, so repeated calls
/// do not accumulate.
template <typename T>
GradMap<T> backward(const Var<T>& loss);

}  // namespace xledit::num
