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

#include "xledit/model/params.hpp"

namespace xledit::model {

namespace {

enum class Kind { kWeight, kBias, kGain };

template <typename T, typename Make>
Params<T> build(const ModelConfig& c, Make&& make) {
  using num::Shape;
  const std::size_t d = c.d_model, f = c.d_ff, v = c.vocab_size, m = c.n_styles;
  Params<T> p;
  p.config = c;
  p.embed = make("embed", Shape{v, d}, Kind::kWeight);
  p.out_bias = make("out_bias", Shape{v}, Kind::kBias);
  p.query_init = make("query_init", Shape{1, d}, Kind::kWeight);
  p.pos_u = make("pos_u", Shape{d}, Kind::kBias);
  p.pos_v = make("pos_v", Shape{d}, Kind::kBias);
  for (int l = 0; l < c.n_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    LayerParams<T> L;
    L.w_q = make(pre + "attn.q", Shape{d, d}, Kind::kWeight);
    L.w_k = make(pre + "attn.k", Shape{d, d}, Kind::kWeight);
    L.w_kr = make(pre + "attn.kr", Shape{d, d}, Kind::kWeight);
    L.w_v = make(pre + "attn.v", Shape{d, d}, Kind::kWeight);
    L.w_o = make(pre + "attn.o", Shape{d, d}, Kind::kWeight);
    L.ln1_gamma = make(pre + "ln1.gamma", Shape{d}, Kind::kGain);
    L.ln1_beta = make(pre + "ln1.beta", Shape{d}, Kind::kBias);
    L.ff_w1 = make(pre + "ffn.w1", Shape{d, f}, Kind::kWeight);
    L.ff_b1 = make(pre + "ffn.b1", Shape{f}, Kind::kBias);
    L.ff_w2 = make(pre + "ffn.w2", Shape{f, d}, Kind::kWeight);
    L.ff_b2 = make(pre + "ffn.b2", Shape{d}, Kind::kBias);
    L.ln2_gamma = make(pre + "ln2.gamma", Shape{d}, Kind::kGain);
    L.ln2_beta = make(pre + "ln2.beta", Shape{d}, Kind::kBias);
    p.layers.push_back(std::move(L));
  }
  p.cls_w1 = make("cls.w1", Shape{d, d}, Kind::kWeight);
  p.cls_b1 = make("cls.b1", Shape{d}, Kind::kBias);
  p.cls_w2 = make("cls.w2", Shape{d, m}, Kind::kWeight);
  p.cls_b2 = make("cls.b2", Shape{m}, Kind::kBias);
  return p;
}

}  // namespace

template <typename T>
Params<T> Params<T>::init(const ModelConfig& config, num::Rng& rng) {
  config.validate();
  return build<T>(config, [&](const std::string& name, const num::Shape& shape, Kind kind) {
    num::Tensor<T> t(shape);
    if (kind == Kind::kGain) {
      t.fill(T(1));
    } else if (kind == Kind::kWeight) {
      // each tensor draws from its own stream so adding a layer does not
      // reshuffle the others
      num::Rng r = rng.split(name);
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<T>(r.truncated_normal(config.init_std));
    }
    return num::Var<T>::leaf(std::move(t));
  });
}

template <typename T>
Params<T> Params<T>::zeros(const ModelConfig& config) {
  config.validate();
  return build<T>(config, [](const std::string&, const num::Shape& shape, Kind) {
    return num::Var<T>::leaf(num::Tensor<T>(shape));
  });
}

template <typename T>
std::vector<std::pair<std::string, num::Var<T>>> Params<T>::named() const {
  std::vector<std::pair<std::string, num::Var<T>>> out;
  out.emplace_back("embed", embed);
  out.emplace_back("out_bias", out_bias);
  out.emplace_back("query_init", query_init);
  out.emplace_back("pos_u", pos_u);
  out.emplace_back("pos_v", pos_v);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    const auto& L = layers[l];
    out.emplace_back(pre + "attn.q", L.w_q);
    out.emplace_back(pre + "attn.k", L.w_k);
    out.emplace_back(pre + "attn.kr", L.w_kr);
    out.emplace_back(pre + "attn.v", L.w_v);
    out.emplace_back(pre + "attn.o", L.w_o);
    out.emplace_back(pre + "ln1.gamma", L.ln1_gamma);
    out.emplace_back(pre + "ln1.beta", L.ln1_beta);
    out.emplace_back(pre + "ffn.w1", L.ff_w1);
    out.emplace_back(pre + "ffn.b1", L.ff_b1);
    out.emplace_back(pre + "ffn.w2", L.ff_w2);
    out.emplace_back(pre + "ffn.b2", L.ff_b2);
    out.emplace_back(pre + "ln2.gamma", L.ln2_gamma);
    out.emplace_back(pre + "ln2.beta", L.ln2_beta);
  }
  out.emplace_back("cls.w1", cls_w1);
  out.emplace_back("cls.b1", cls_b1);
  out.emplace_back("cls.w2", cls_w2);
  out.emplace_back("cls.b2", cls_b2);
  return out;
}

template <typename T>
std::vector<num::Var<T>> Params<T>::all() const {
  std::vector<num::Var<T>> out;
  for (auto& [name, v] : named()) out.push_back(v);
  return out;
}

template <typename T>
void Params<T>::set_requires_grad(bool on) const {
  for (auto& [name, v] : named()) v.node()->requires_grad = on;
}

template <typename T>
template <typename U>
Params<U> Params<T>::cast() const {
  auto src = named();
  std::size_t k = 0;
  return build<U>(config, [&](const std::string&, const num::Shape&, Kind) {
    return num::Var<U>::leaf(src[k++].second.value().template cast<U>());
  });
}

template struct Params<float>;
template struct Params<double>;
template Params<double> Params<float>::cast<double>() const;
template Params<float> Params<float>::cast<float>() const;
template Params<float> Params<double>::cast<float>() const;
template Params<double> Params<double>::cast<double>() const;

}  // namespace xledit::model
