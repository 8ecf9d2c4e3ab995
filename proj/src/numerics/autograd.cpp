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

#include "xledit/numerics/autograd.hpp"

#include <atomic>
#include <unordered_set>

namespace xledit::num {

NodeId next_node_id() {
  static std::atomic<NodeId> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

template <typename T>
GradMap<T> backward(const Var<T>& loss) {
  XLEDIT_REQUIRE(loss.valid(), "backward: empty loss handle");
  XLEDIT_REQUIRE(loss.value().size() == 1,
                 "backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
  GradMap<T> grads;
  if (!loss.requires_grad()) return grads;

  // Post-order DFS gives a topological order (inputs before consumers).
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<T>* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad().fill(T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (node->grad.empty()) continue;
    if (node->backward) node->backward(*node);
  }
  for (Node<T>* node : order) {
    if (node->inputs.empty()) {
      if (!node->grad.empty()) grads.emplace(node->id, std::move(node->grad));
    }
    node->grad = Tensor<T>();
  }
  return grads;
}

template GradMap<float> backward(const Var<float>&);
template GradMap<double> backward(const Var<double>&);

}  // namespace xledit::num
