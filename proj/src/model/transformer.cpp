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

#include "xledit/model/transformer.hpp"

#include <algorithm>
#include <cmath>

#include "xledit/error.hpp"

namespace xledit::model {

using num::Mask;
using num::Tensor;
using num::Var;
namespace ops = num::ops;

template <typename T>
Model<T>::Model(Params<T> params)
    : params_(std::move(params)), table_(params_.config.d_model, params_.config.max_offset) {
  params_.config.validate();
  const auto& c = params_.config;
  emittable_.assign(c.vocab_size, 1);
  emittable_[enc::kPad] = 0;
  emittable_[enc::kCls] = 0;
  for (int s = 0; s < c.n_styles; ++s) emittable_[enc::kFirstStyle + s] = 0;
  if (c.l2r) emittable_[enc::kEoi] = 0;
}

template <typename T>
const PositionKeys<T>& Model<T>::full_position_keys() const {
  if (cache_.per_layer.empty()) {
    const int d = config().max_offset;
    auto r = Var<T>::constant(table_.rows<T>(-d, d));
    cache_.lo = -d;
    cache_.hi = d;
    for (auto& L : params_.layers) cache_.per_layer.push_back(ops::matmul(r, L.w_kr));
  }
  return cache_;
}

template <typename T>
PositionKeys<T> Model<T>::position_keys(int lo, int hi) const {
  if (!params_.requires_grad()) return full_position_keys();
  const int d = config().max_offset;
  PositionKeys<T> keys;
  keys.lo = std::clamp(std::min(lo, 0), -d, d);
  keys.hi = std::clamp(std::max(hi, 0), -d, d);
  auto r = Var<T>::constant(table_.rows<T>(keys.lo, keys.hi));
  for (auto& L : params_.layers) keys.per_layer.push_back(ops::matmul(r, L.w_kr));
  return keys;
}

template <typename T>
Var<T> Model<T>::dropout(const Var<T>& x, const ForwardOptions& opts) const {
  const double p = config().dropout;
  if (!opts.train || p <= 0.0) return x;
  XLEDIT_REQUIRE(opts.rng != nullptr, "dropout needs an rng");
  Tensor<T> keep(x.shape());
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = opts.rng->uniform() < p ? T(0) : scale;
  return ops::mul(x, Var<T>::constant(std::move(keep)));
}

template <typename T>
Var<T> Model<T>::attend(const LayerParams<T>& L, const Var<T>& x, const Var<T>& k, const Var<T>& v,
                        const PositionKeys<T>& keys, int layer, std::span<const int> offsets, const Mask* mask,
                        const ForwardOptions& opts) const {
  const std::size_t m = x.rows(), nk = k.rows();
  const std::size_t d = config().d_model, heads = config().n_heads, dh = config().head_dim();
  XLEDIT_REQUIRE(x.cols() == d && (nk == 0 || (k.cols() == d && v.cols() == d && v.rows() == nk)),
                 "attend: state shape mismatch");
  XLEDIT_REQUIRE(offsets.size() == m * nk, "attend: offset count mismatch");
  if (nk == 0) return Var<T>::constant(Tensor<T>(num::Shape{m, d}));

  std::vector<int> idx(offsets.size());
  const int dmax = config().max_offset;
  for (std::size_t t = 0; t < offsets.size(); ++t) idx[t] = keys.index(std::clamp(offsets[t], -dmax, dmax));

  const auto& kr = keys.per_layer.at(layer);
  auto q = ops::matmul(x, L.w_q);
  auto qu = ops::add_row(q, params_.pos_u);
  auto qv = ops::add_row(q, params_.pos_v);
  const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
  std::vector<Var<T>> per_head;
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t c0 = h * dh, c1 = c0 + dh;
    auto slice = [&](const Var<T>& t) { return heads == 1 ? t : ops::slice_cols(t, c0, c1); };
    auto content = ops::matmul_bt(slice(qu), slice(k));
    auto position = ops::gather_cols(ops::matmul_bt(slice(qv), slice(kr)), idx);
    auto scores = ops::scale(ops::add(content, position), inv);
    per_head.push_back(ops::matmul(ops::softmax(scores, mask), slice(v)));
  }
  auto merged = heads == 1 ? per_head[0] : ops::concat_cols(per_head);
  return dropout(ops::matmul(merged, L.w_o), opts);
}

template <typename T>
Var<T> Model<T>::finish(const LayerParams<T>& L, const Var<T>& x, const Var<T>& attn,
                        const ForwardOptions& opts) const {
  auto h = ops::layernorm(ops::add(x, attn), L.ln1_gamma, L.ln1_beta);
  auto f = ops::add_row(ops::matmul(ops::gelu(ops::add_row(ops::matmul(h, L.ff_w1), L.ff_b1)), L.ff_w2), L.ff_b2);
  return ops::layernorm(ops::add(h, dropout(f, opts)), L.ln2_gamma, L.ln2_beta);
}

template <typename T>
Var<T> Model<T>::output_log_probs(const Var<T>& g) const {
  auto logits = ops::add_row(ops::matmul_bt(g, params_.embed), params_.out_bias);
  const std::size_t rows = g.rows(), vocab = emittable_.size();
  Mask mask(rows, vocab);
  for (std::size_t r = 0; r < rows; ++r) std::copy(emittable_.begin(), emittable_.end(), mask.bits.begin() + r * vocab);
  return ops::log_softmax(logits, &mask);
}

template <typename T>
Var<T> Model<T>::run(const std::vector<int>& tokens, std::span<const int> content_offsets, const Mask* content_mask,
                     int slots, std::span<const int> query_offsets, const Mask* query_mask,
                     const PositionKeys<T>& keys, const ForwardOptions& opts, Var<T>* content_top) const {
  auto h = dropout(ops::embedding(params_.embed, tokens), opts);
  Var<T> g;
  if (slots > 0) g = dropout(ops::repeat_rows(params_.query_init, slots), opts);
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const auto& L = params_.layers[l];
    auto k = ops::matmul(h, L.w_k);
    auto v = ops::matmul(h, L.w_v);
    auto ah = attend(L, h, k, v, keys, static_cast<int>(l), content_offsets, content_mask, opts);
    if (slots > 0) {
      auto ag = attend(L, g, k, v, keys, static_cast<int>(l), query_offsets, query_mask, opts);
      g = finish(L, g, ag, opts);
    }
    h = finish(L, h, ah, opts);
  }
  if (content_top) *content_top = h;
  return g;
}

template <typename T>
Var<T> Model<T>::slot_log_probs(const enc::ComposedRow& row, const ForwardOptions& opts) const {
  const int n = row.length();
  return slot_log_probs(row, position_keys(-(n - 1), n - 1), opts);
}

template <typename T>
Var<T> Model<T>::slot_log_probs(const enc::ComposedRow& row, const PositionKeys<T>& keys,
                                const ForwardOptions& opts) const {
  XLEDIT_REQUIRE(row.l2r == config().l2r, "composed row and model disagree on left-to-right mode");
  XLEDIT_REQUIRE(row.layout.total_len == row.length(), "composed row layout length mismatch");
  const auto om = pos::build_offset_matrix(row.layout, scheme());
  const int n = om.n, a0 = row.layout.a - 1, slots = row.num_slots();
  Mask content(n, n);
  content.bits = om.legal;
  Mask query(slots, n);
  std::vector<int> qoff(static_cast<std::size_t>(slots) * n);
  for (int s = 0; s < slots; ++s)
    for (int j = 0; j < n; ++j) {
      const int i = a0 + s;
      qoff[s * n + j] = om.offset(i, j);
      query.set(s, j, om.is_legal(i, j) && i != j);
    }
  auto g = run(row.tokens, om.offsets, &content, slots, qoff, &query, keys, opts, nullptr);
  return output_log_probs(g);
}

template <typename T>
Var<T> Model<T>::content_states(const enc::ComposedRow& row) const {
  const auto om = pos::build_offset_matrix(row.layout, scheme());
  Mask content(om.n, om.n);
  content.bits = om.legal;
  Var<T> top;
  run(row.tokens, om.offsets, &content, 0, {}, nullptr, position_keys(-(om.n - 1), om.n - 1), {}, &top);
  return top;
}

template <typename T>
Var<T> Model<T>::row_nll(const enc::ComposedRow& row, const PositionKeys<T>& keys, const ForwardOptions& opts) const {
  auto lp = slot_log_probs(row, keys, opts);
  std::vector<int> targets;
  for (int s = 0; s < row.num_slots(); ++s) {
    const int t = row.target(s);
    XLEDIT_REQUIRE(emittable_[t], "span target " + std::to_string(t) + " is not an emittable token");
    targets.push_back(t);
  }
  return ops::scale(ops::sum(ops::pick(lp, targets)), T(-1));
}

template <typename T>
Var<T> Model<T>::insertion_loss(const enc::ComposedBatch& batch, const ForwardOptions& opts) const {
  XLEDIT_REQUIRE(!batch.rows.empty(), "insertion_loss on an empty batch");
  const int n = batch.max_length();
  auto keys = position_keys(-(n - 1), n - 1);
  Var<T> total;
  for (auto& row : batch.rows) {
    auto nll = row_nll(row, keys, opts);
    total = total.valid() ? ops::add(total, nll) : nll;
  }
  return ops::scale(total, static_cast<T>(1.0 / batch.rows.size()));
}

template <typename T>
Var<T> Model<T>::style_logits(std::span<const int> x, const ForwardOptions& opts) const {
  const int n = static_cast<int>(x.size()) + 1;
  return style_logits(x, position_keys(-(n - 1), n - 1), opts);
}

template <typename T>
Var<T> Model<T>::style_logits(std::span<const int> x, const PositionKeys<T>& keys, const ForwardOptions& opts) const {
  XLEDIT_REQUIRE(!x.empty(), "cannot classify an empty sequence");
  XLEDIT_REQUIRE(config().n_styles >= 1, "model has no styles");
  std::vector<int> tokens(x.begin(), x.end());
  tokens.push_back(enc::kCls);
  const int n = static_cast<int>(tokens.size());
  const auto om = pos::build_full_offset_matrix(n);
  Var<T> top;
  run(tokens, om.offsets, nullptr, 0, {}, nullptr, keys, opts, &top);
  auto cls = ops::slice_rows(top, n - 1, n);
  auto hidden = dropout(ops::gelu(ops::add_row(ops::matmul(cls, params_.cls_w1), params_.cls_b1)), opts);
  return ops::add_row(ops::matmul(hidden, params_.cls_w2), params_.cls_b2);
}

template <typename T>
Var<T> Model<T>::style_loss(std::span<const std::vector<int>> xs, std::span<const int> styles,
                            const ForwardOptions& opts) const {
  XLEDIT_REQUIRE(!xs.empty() && xs.size() == styles.size(), "style_loss: need matching non-empty inputs");
  std::size_t longest = 0;
  for (auto& x : xs) longest = std::max(longest, x.size());
  const int n = static_cast<int>(longest) + 1;
  auto keys = position_keys(-(n - 1), n - 1);
  Var<T> total;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    XLEDIT_REQUIRE(styles[r] >= 0 && styles[r] < config().n_styles,
                   "style label " + std::to_string(styles[r]) + " out of range");
    const int label = styles[r];
    auto ce = ops::scale(ops::sum(ops::pick(ops::log_softmax(style_logits(xs[r], keys, opts)), std::span<const int>(&label, 1))), T(-1));
    total = total.valid() ? ops::add(total, ce) : ce;
  }
  return ops::scale(total, static_cast<T>(1.0 / xs.size()));
}

template <typename T>
std::vector<T> Model<T>::classify_style(std::span<const int> x) const {
  auto p = ops::softmax(style_logits(x));
  return std::vector<T>(p.value().data(), p.value().data() + p.value().size());
}

template class Model<float>;
template class Model<double>;

}  // namespace xledit::model
