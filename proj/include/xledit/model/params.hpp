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

#include <string>
#include <utility>
#include <vector>

#include "xledit/model/config.hpp"
#include "xledit/numerics/autograd.hpp"
#include "xledit/numerics/rng.hpp"

namespace xledit::model {

template <typename T>
struct LayerParams {
  num::Var<T> w_q, w_k, w_kr, w_v, w_o;  // [d, d]
  num::Var<T> ln1_gamma, ln1_beta;       // [d]
  num::Var<T> ff_w1, ff_b1;              // [d, d_ff], [d_ff]
  num::Var<T> ff_w2, ff_b2;              // [d_ff, d], [d]
  num::Var<T> ln2_gamma, ln2_beta;       // [d]
};

template <typename T>
struct Params {
  ModelConfig config;
  num::Var<T> embed;       // [V, d], also the output projection
  num::Var<T> out_bias;    // [V]
  num::Var<T> query_init;  // [1, d]
  num::Var<T> pos_u, pos_v;  // [d], shared by all layers
  std::vector<LayerParams<T>> layers;
  num::Var<T> cls_w1, cls_b1;  // [d, d], [d]
  num::Var<T> cls_w2, cls_b2;  // [d, M], [M]

  /// Truncated normal weights, zero biases, unit layer-norm gains.
  static Params init(const ModelConfig& config, num::Rng& rng);
  /// Every tensor zero, including layer-norm gains.
  static Params zeros(const ModelConfig& config);

  std::vector<std::pair<std::string, num::Var<T>>> named() const;
  std::vector<num::Var<T>> all() const;

  void set_requires_grad(bool on) const;
  bool requires_grad() const { return embed.requires_grad(); }

  /// Deep copy (fresh nodes), optionally changing precision.
  template <typename U>
  Params<U> cast() const;
  Params clone() const { return cast<T>(); }
};

}  // namespace xledit::model
