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

#include "xledit/numerics/adam.hpp"

#include <cmath>

namespace xledit::num {

template <typename T>
void adam_step(std::span<const Var<T>> params, const GradMap<T>& grads, AdamState<T>& state) {
  for (const auto& p : params) {
    auto it = grads.find(p.id());
    if (it == grads.end()) continue;
    XLEDIT_REQUIRE(it->second.shape() == p.shape(),
                   "adam_step: gradient shape " + shape_str(it->second.shape()) +
                       " does not match parameter " + shape_str(p.shape()));
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const T b1 = T(state.beta1), b2 = T(state.beta2);
  for (const auto& p : params) {
    auto it = grads.find(p.id());
    if (it == grads.end()) continue;
    const Tensor<T>& g = it->second;
    auto& m = state.first.try_emplace(p.id(), p.shape()).first->second;
    auto& v = state.second.try_emplace(p.id(), p.shape()).first->second;
    XLEDIT_REQUIRE(m.shape() == p.shape(), "adam_step: moment shape mismatch");
    Tensor<T>& w = p.mutable_value();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const double mhat = static_cast<double>(m[i]) / c1;
      const double vhat = static_cast<double>(v[i]) / c2;
      w[i] -= static_cast<T>(state.lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

template <typename T>
double grad_norm(std::span<const Var<T>> params, const GradMap<T>& grads) {
  double total = 0;
  for (const auto& p : params) {
    auto it = grads.find(p.id());
    if (it == grads.end()) continue;
    for (T v : it->second.values()) total += static_cast<double>(v) * static_cast<double>(v);
  }
  return std::sqrt(total);
}

template <typename T>
double clip_grad_norm(std::span<const Var<T>> params, GradMap<T>& grads, double max_norm) {
  const double norm = grad_norm(params, grads);
  if (norm > max_norm && norm > 0) {
    const T factor = static_cast<T>(max_norm / norm);
    for (const auto& p : params) {
      auto it = grads.find(p.id());
      if (it == grads.end()) continue;
      for (auto& v : it->second.values()) v *= factor;
    }
  }
  return norm;
}

template void adam_step(std::span<const Var<float>>, const GradMap<float>&, AdamState<float>&);
template void adam_step(std::span<const Var<double>>, const GradMap<double>&, AdamState<double>&);
template double grad_norm(std::span<const Var<float>>, const GradMap<float>&);
template double grad_norm(std::span<const Var<double>>, const GradMap<double>&);
template double clip_grad_norm(std::span<const Var<float>>, GradMap<float>&, double);
template double clip_grad_norm(std::span<const Var<double>>, GradMap<double>&, double);

}  // namespace xledit::num
