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

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>

#include "xledit/numerics/autograd.hpp"

namespace xledit::num {

template <typename T>
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::unordered_map<NodeId, Tensor<T>> first;
  std::unordered_map<NodeId, Tensor<T>> second;
};

/// One bias-corrected Adam update. Parameters without an entry in `grads`
/// are left untouched, moments included.
template <typename T>
void adam_step(std::span<const Var<T>> params, const GradMap<T>& grads, AdamState<T>& state);

/// Global L2 norm of the gradients of `params`, in parameter order.
template <typename T>
double grad_norm(std::span<const Var<T>> params, const GradMap<T>& grads);

/// Rescales every gradient so the global norm is at most max_norm. Returns
/// the norm before clipping.
template <typename T>
double clip_grad_norm(std::span<const Var<T>> params, GradMap<T>& grads, double max_norm);

}  // namespace xledit::num
