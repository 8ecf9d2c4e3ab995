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

// Two-stream relative-attention transformer over composed rows.
//
// The content stream runs over every position of the row; the query stream
// runs only over span slots, starts from a learned vector, and at each layer
// reads the content states of the layer below. Both streams use the same
// weights. Attention between a query at position i and a key at j scores
//
//   ((q_i + u) . k_j + (q_i + v) . r_{o(i,j)}) / sqrt(head_dim)
//
// where r_o is the projected sinusoid for the offset o(i, j) supplied by the
// positional module and pairs without an offset are masked out.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xledit/encoding/compose.hpp"
#include "xledit/model/params.hpp"
#include "xledit/numerics/ops.hpp"
#include "xledit/positional/offsets.hpp"
#include "xledit/positional/sinusoid.hpp"

namespace xledit::model {

struct ForwardOptions {
  bool train = false;         // apply dropout
  num::Rng* rng = nullptr;    // dropout draws, required when train is set
};

/// Projected position rows r_o = R_o W_kr for o in [lo, hi], one per layer.
template <typename T>
struct PositionKeys {
  int lo = 0;
  int hi = -1;
  std::vector<num::Var<T>> per_layer;

  /// Column index of offset o (after clamping to the table range).
  int index(int offset) const { return offset - lo; }
};

template <typename T>
class Model {
 public:
  explicit Model(Params<T> params);

  const ModelConfig& config() const { return params_.config; }
  const Params<T>& params() const { return params_; }
  Params<T>& params() { return params_; }
  const pos::SinusoidTable& sinusoids() const { return table_; }

  /// Call after updating parameter values in place.
  void params_changed() const { cache_.per_layer.clear(); }

  pos::OffsetScheme scheme() const {
    return config().l2r ? pos::OffsetScheme::kLeftToRight : pos::OffsetScheme::kInsertion;
  }

  /// 1 where the output distribution may place mass.
  const std::vector<std::uint8_t>& emittable() const { return emittable_; }

  /// [slots, V] log-probabilities at the span slots of a composed row.
  num::Var<T> slot_log_probs(const enc::ComposedRow& row, const ForwardOptions& opts = {}) const;
  num::Var<T> slot_log_probs(const enc::ComposedRow& row, const PositionKeys<T>& keys,
                             const ForwardOptions& opts) const;

  /// [n, d] top-layer content states of every position of a composed row.
  num::Var<T> content_states(const enc::ComposedRow& row) const;

  /// Summed negative log-likelihood of the span targets (and EOI) of one row.
  num::Var<T> row_nll(const enc::ComposedRow& row, const PositionKeys<T>& keys, const ForwardOptions& opts) const;
  /// Mean over rows of row_nll.
  num::Var<T> insertion_loss(const enc::ComposedBatch& batch, const ForwardOptions& opts = {}) const;

  /// [1, M] style logits from the top CLS state of x ++ CLS, full attention.
  num::Var<T> style_logits(std::span<const int> x, const ForwardOptions& opts = {}) const;
  num::Var<T> style_logits(std::span<const int> x, const PositionKeys<T>& keys, const ForwardOptions& opts) const;
  /// Mean cross-entropy over (x, style) pairs.
  num::Var<T> style_loss(std::span<const std::vector<int>> xs, std::span<const int> styles,
                         const ForwardOptions& opts = {}) const;
  std::vector<T> classify_style(std::span<const int> x) const;

  /// Position keys covering offsets [lo, hi] after clamping. When the
  /// parameters take no gradients the cached [-D, D] table is returned.
  PositionKeys<T> position_keys(int lo, int hi) const;
  const PositionKeys<T>& full_position_keys() const;

  // Building blocks shared with the incremental session.

  /// Attention sublayer output (after W_o, before the residual) for query
  /// states x [m, d] against projected keys/values [nk, d]. `offsets` holds
  /// m * nk raw offsets; `mask` may be null when every pair is legal.
  num::Var<T> attend(const LayerParams<T>& L, const num::Var<T>& x, const num::Var<T>& k, const num::Var<T>& v,
                     const PositionKeys<T>& keys, int layer, std::span<const int> offsets, const num::Mask* mask,
                     const ForwardOptions& opts) const;
  /// Residual + norm, feed-forward, residual + norm.
  num::Var<T> finish(const LayerParams<T>& L, const num::Var<T>& x, const num::Var<T>& attn,
                     const ForwardOptions& opts) const;
  num::Var<T> dropout(const num::Var<T>& x, const ForwardOptions& opts) const;
  /// Log-softmax over emittable ids for top query states [m, d].
  num::Var<T> output_log_probs(const num::Var<T>& g) const;

 private:
  num::Var<T> run(const std::vector<int>& tokens, std::span<const int> content_offsets, const num::Mask* content_mask,
                  int slots, std::span<const int> query_offsets, const num::Mask* query_mask,
                  const PositionKeys<T>& keys, const ForwardOptions& opts, num::Var<T>* content_top) const;

  Params<T> params_;
  pos::SinusoidTable table_;
  std::vector<std::uint8_t> emittable_;
  mutable PositionKeys<T> cache_;
};

}  // namespace xledit::model
