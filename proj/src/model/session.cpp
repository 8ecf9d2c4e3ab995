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

#include "xledit/model/session.hpp"

#include <cmath>
#include <limits>

#include "xledit/error.hpp"

namespace xledit::model {

using num::Var;
namespace ops = num::ops;

template <typename T>
InsertionSession<T>::InsertionSession(const Model<T>& model, std::span<const int> left, std::span<const int> right,
                                      int style, int slots)
    : model_(model) {
  XLEDIT_REQUIRE(slots >= 1, "session needs at least one span slot");
  std::vector<int> ctx(left.begin(), left.end());
  ctx.insert(ctx.end(), right.begin(), right.end());
  if (style >= 0) {
    XLEDIT_REQUIRE(style < model.config().n_styles, "style " + std::to_string(style) + " out of range");
    ctx.push_back(enc::kFirstStyle + style);
  }
  n_left_ = static_cast<int>(left.size());
  n_right_ = static_cast<int>(ctx.size()) - n_left_;
  slots_ = slots;
  layout_ = {n_left_ + slots + n_right_, n_left_ + 1, n_left_ + slots};
  const int total = layout_.total_len;
  keys_ = model.position_keys(-(total - 1), total - 1);

  const int nc = static_cast<int>(ctx.size());
  auto ctx_pos = [&](int c) { return c < n_left_ ? c + 1 : layout_.b + 1 + (c - n_left_); };
  std::vector<int> offsets(static_cast<std::size_t>(nc) * nc);
  for (int r = 0; r < nc; ++r)
    for (int c = 0; c < nc; ++c) {
      auto off = pos::pair_offset(model.scheme(), layout_, ctx_pos(r), ctx_pos(c));
      XLEDIT_REQUIRE(off.has_value(), "context pair without an offset");
      offsets[r * nc + c] = *off;
    }

  const ForwardOptions infer;
  const auto& params = model.params();
  Var<T> h;
  if (nc > 0) h = ops::embedding(params.embed, ctx);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& L = params.layers[l];
    LayerKeys lk;
    if (nc > 0) {
      auto k = ops::matmul(h, L.w_k);
      auto v = ops::matmul(h, L.w_v);
      if (n_left_ > 0) lk.k_left = ops::slice_rows(k, 0, n_left_), lk.v_left = ops::slice_rows(v, 0, n_left_);
      if (n_right_ > 0) lk.k_right = ops::slice_rows(k, n_left_, nc), lk.v_right = ops::slice_rows(v, n_left_, nc);
      h = model.finish(L, h, model.attend(L, h, k, v, keys_, static_cast<int>(l), offsets, nullptr, infer), infer);
    }
    layers_.push_back(std::move(lk));
  }
}

template <typename T>
Var<T> InsertionSession<T>::stack_keys(const Var<T>& left, const Var<T>& span, const Var<T>& right) const {
  std::vector<Var<T>> parts;
  for (auto* p : {&left, &span, &right})
    if (p->valid()) parts.push_back(*p);
  if (parts.empty()) return {};
  return parts.size() == 1 ? parts[0] : ops::concat_rows(parts);
}

template <typename T>
std::vector<int> InsertionSession<T>::key_offsets(int query_pos, int span_keys) const {
  std::vector<int> out;
  out.reserve(n_left_ + span_keys + n_right_);
  auto add = [&](int j) {
    auto off = pos::pair_offset(model_.scheme(), layout_, query_pos, j);
    XLEDIT_REQUIRE(off.has_value(), "illegal key in session");
    out.push_back(*off);
  };
  for (int j = 1; j <= n_left_; ++j) add(j);
  for (int s = 0; s < span_keys; ++s) add(layout_.a + s);
  for (int r = 0; r < n_right_; ++r) add(layout_.b + 1 + r);
  return out;
}

template <typename T>
std::vector<T> InsertionSession<T>::next_log_probs() const {
  if (pushed_ >= slots_) throw CapReached("no span slot left after " + std::to_string(pushed_) + " tokens");
  const ForwardOptions infer;
  const auto& params = model_.params();
  const int p = layout_.a + pushed_;
  const auto offsets = key_offsets(p, pushed_);
  Var<T> g = params.query_init;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& L = params.layers[l];
    const auto& lk = layers_[l];
    auto k = stack_keys(lk.k_left, lk.k_span, lk.k_right);
    auto v = stack_keys(lk.v_left, lk.v_span, lk.v_right);
    Var<T> attn = k.valid() ? model_.attend(L, g, k, v, keys_, static_cast<int>(l), offsets, nullptr, infer)
                            : Var<T>::constant(num::Tensor<T>(num::Shape{1, g.cols()}));
    g = model_.finish(L, g, attn, infer);
  }
  auto lp = model_.output_log_probs(g);
  return std::vector<T>(lp.value().data(), lp.value().data() + lp.value().size());
}

template <typename T>
void InsertionSession<T>::push(int token) {
  if (pushed_ + 1 >= slots_ + (model_.config().l2r ? 1 : 0))
    throw CapReached("span cap of " + std::to_string(slots_) + " slots reached");
  XLEDIT_REQUIRE(token >= 0 && token < model_.config().vocab_size && model_.emittable()[token] && token != enc::kEoi,
                 "token " + std::to_string(token) + " cannot be inserted");
  const ForwardOptions infer;
  const auto& params = model_.params();
  const int p = layout_.a + pushed_;
  const auto offsets = key_offsets(p, pushed_ + 1);
  const int ids[1] = {token};
  Var<T> h = ops::embedding(params.embed, std::span<const int>(ids, 1));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& L = params.layers[l];
    auto& lk = layers_[l];
    auto k = ops::matmul(h, L.w_k);
    auto v = ops::matmul(h, L.w_v);
    lk.k_span = lk.k_span.valid() ? ops::concat_rows(std::vector<Var<T>>{lk.k_span, k}) : k;
    lk.v_span = lk.v_span.valid() ? ops::concat_rows(std::vector<Var<T>>{lk.v_span, v}) : v;
    auto keys = stack_keys(lk.k_left, lk.k_span, lk.k_right);
    auto vals = stack_keys(lk.v_left, lk.v_span, lk.v_right);
    h = model_.finish(L, h, model_.attend(L, h, keys, vals, keys_, static_cast<int>(l), offsets, nullptr, infer),
                      infer);
  }
  ++pushed_;
}

double DecodeResult::total() const {
  double s = 0;
  for (double v : logprobs) s += v;
  return s;
}

int argmax_allowed(std::span<const double> scores, std::span<const std::uint8_t> allowed) {
  int best = -1;
  for (std::size_t k = 0; k < scores.size(); ++k)
    if (allowed[k] && (best < 0 || scores[k] > scores[best])) best = static_cast<int>(k);
  XLEDIT_REQUIRE(best >= 0, "argmax over an empty support");
  return best;
}

namespace {

template <typename T>
int choose(const std::vector<T>& lp, std::vector<std::uint8_t> allowed, const DecodeOptions& opts, bool first) {
  for (std::size_t k = 0; k < lp.size(); ++k)
    if (lp[k] == -std::numeric_limits<T>::infinity()) allowed[k] = 0;
  if (first && opts.forbid_empty) allowed[enc::kEoi] = 0;
  if (first && opts.first_scores) {
    XLEDIT_REQUIRE(opts.first_scores->size() == lp.size(), "first-token scores have the wrong length");
    return argmax_allowed(*opts.first_scores, allowed);
  }
  std::vector<double> scores(lp.begin(), lp.end());
  if (opts.mode == DecodeOptions::Mode::kGreedy) return argmax_allowed(scores, allowed);
  XLEDIT_REQUIRE(opts.rng != nullptr, "sampling needs an rng");
  double z = 0;
  for (std::size_t k = 0; k < scores.size(); ++k)
    if (allowed[k]) z += std::exp(scores[k]);
  double u = opts.rng->uniform() * z;
  int last = -1;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!allowed[k]) continue;
    last = static_cast<int>(k);
    u -= std::exp(scores[k]);
    if (u < 0) return last;
  }
  XLEDIT_REQUIRE(last >= 0, "sampling over an empty support");
  return last;
}

}  // namespace

template <typename T>
DecodeResult decode(const Model<T>& model, std::span<const int> left, std::span<const int> right, int style,
                    const DecodeOptions& opts) {
  XLEDIT_REQUIRE(!model.config().l2r, "open-ended decoding needs the insertion model");
  XLEDIT_REQUIRE(opts.cap >= 0, "negative decode cap");
  InsertionSession<T> session(model, left, right, style, opts.cap + 1);
  DecodeResult out;
  for (;;) {
    const auto lp = session.next_log_probs();
    const bool first = session.pushed() == 0;
    const int tok = choose(lp, model.emittable(), opts, first);
    if (tok == enc::kEoi || session.pushed() == opts.cap) {
      out.hit_cap = tok != enc::kEoi;
      out.logprobs.push_back(lp[enc::kEoi]);
      return out;
    }
    out.tokens.push_back(tok);
    out.logprobs.push_back(lp[tok]);
    session.push(tok);
  }
}

template <typename T>
DecodeResult decode_fixed(const Model<T>& model, std::span<const int> left, std::span<const int> right, int style,
                          int length) {
  XLEDIT_REQUIRE(model.config().l2r, "fixed-length decoding needs the left-to-right model");
  XLEDIT_REQUIRE(length >= 1, "fixed-length decode needs length >= 1");
  InsertionSession<T> session(model, left, right, style, length);
  DecodeResult out;
  DecodeOptions greedy;
  for (int t = 0; t < length; ++t) {
    const auto lp = session.next_log_probs();
    const int tok = choose(lp, model.emittable(), greedy, false);
    out.tokens.push_back(tok);
    out.logprobs.push_back(lp[tok]);
    if (t + 1 < length) session.push(tok);
  }
  return out;
}

template class InsertionSession<float>;
template class InsertionSession<double>;
template DecodeResult decode(const Model<float>&, std::span<const int>, std::span<const int>, int,
                             const DecodeOptions&);
template DecodeResult decode(const Model<double>&, std::span<const int>, std::span<const int>, int,
                             const DecodeOptions&);
template DecodeResult decode_fixed(const Model<float>&, std::span<const int>, std::span<const int>, int, int);
template DecodeResult decode_fixed(const Model<double>&, std::span<const int>, std::span<const int>, int, int);

}  // namespace xledit::model
