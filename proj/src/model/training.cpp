/*
 * Copyright 2026 The uxai Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "uxai/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "uxai/errors.hpp"

namespace uxai::model {

using tensor::Activation;
using tensor::Tensor;

namespace {

struct UnitCache {
  Tensor input;
  tensor::BatchNormBatchStats stats;
  Tensor bn_out;
};

struct AttentionCache {
  Tensor input;
  Tensor pooled;
  Tensor hidden;  // before relu
  Tensor hidden_act;
  Tensor gate;
};

struct BlockCache {
  std::optional<UnitCache> expand;
  UnitCache depthwise;
  std::optional<AttentionCache> attention;
  UnitCache project;
};

Tensor unit_forward(ConvUnit& unit, const Tensor& x, UnitCache& cache, double momentum) {
  cache.input = x;
  const Tensor y = tensor::conv2d(x, unit.conv.weight, unit.conv.bias, unit.conv.spec);
  cache.bn_out = tensor::batchnorm_train(y, unit.bn.params, cache.stats);

  auto& p = unit.bn.params;
  const double count = static_cast<double>(y.n()) * y.shape().plane();
  const double unbias = count > 1 ? count / (count - 1) : 1.0;
  for (std::size_t c = 0; c < p.mean.size(); ++c) {
    p.mean[c] = static_cast<float>((1 - momentum) * p.mean[c] + momentum * cache.stats.mean[c]);
    p.var[c] = static_cast<float>((1 - momentum) * p.var[c] +
                                  momentum * cache.stats.var[c] * unbias);
  }
  return unit.act ? tensor::activation(cache.bn_out, *unit.act) : cache.bn_out;
}

Tensor unit_backward(const ConvUnit& unit, ConvUnit& grad, const UnitCache& cache,
                     Tensor g) {
  if (unit.act) g = tensor::activation_vjp(cache.bn_out, *unit.act, g);
  tensor::BatchNormGrads bg = tensor::batchnorm_train_vjp(cache.stats, unit.bn.params, g);
  grad.bn.params.gamma = std::move(bg.gamma);
  grad.bn.params.beta = std::move(bg.beta);
  tensor::ConvGrads cg =
      tensor::conv2d_vjp(cache.input, unit.conv.weight, unit.conv.spec, bg.input);
  grad.conv.weight = std::move(cg.weights);
  grad.conv.bias = std::move(cg.bias);
  return std::move(cg.input);
}

Tensor attention_forward(const SqueezeExcite& se, const Tensor& x, AttentionCache& cache) {
  cache.input = x;
  cache.pooled = tensor::global_avg_pool(x);
  cache.hidden = tensor::linear(cache.pooled, se.reduce.weight, se.reduce.bias);
  cache.hidden_act = tensor::activation(cache.hidden, Activation::kRelu);
  cache.gate = tensor::sigmoid(tensor::linear(cache.hidden_act, se.expand.weight,
                                              se.expand.bias));
  return tensor::scale_channels(x, cache.gate);
}

Tensor attention_backward(const SqueezeExcite& se, SqueezeExcite& grad,
                          const AttentionCache& cache, const Tensor& g) {
  tensor::ScaleGrads sg = tensor::scale_channels_vjp(cache.input, cache.gate, g);
  const Tensor g_logit = tensor::sigmoid_vjp(cache.gate, sg.gate);
  tensor::LinearGrads eg = tensor::linear_vjp(cache.hidden_act, se.expand.weight, g_logit);
  grad.expand.weight = std::move(eg.weights);
  grad.expand.bias = std::move(eg.bias);
  const Tensor g_hidden = tensor::activation_vjp(cache.hidden, Activation::kRelu, eg.input);
  tensor::LinearGrads rg = tensor::linear_vjp(cache.pooled, se.reduce.weight, g_hidden);
  grad.reduce.weight = std::move(rg.weights);
  grad.reduce.bias = std::move(rg.bias);
  const Tensor g_pool = tensor::global_avg_pool_vjp(cache.input.shape(), rg.input);
  return tensor::add(sg.input, g_pool);
}

}  // namespace

Model zeros_like(const Model& model) {
  Model grads = model;
  for (ParamRef& p : grads.parameters()) std::fill(p.values.begin(), p.values.end(), 0.0f);
  return grads;
}

double forward_backward(Model& model, Model& grads, const Tensor& batch,
                        std::span<const int> labels, double bn_momentum) {
  model.check_input(batch);
  if (labels.size() != static_cast<std::size_t>(batch.n())) {
    throw InvalidArgument("forward_backward: " + std::to_string(labels.size()) +
                          " labels for a batch of " + std::to_string(batch.n()));
  }
  if (batch.n() < 2) {
    throw InvalidArgument("forward_backward: batch-statistics BN needs at least 2 rows");
  }

  UnitCache stem_cache;
  Tensor x = unit_forward(model.stem, batch, stem_cache, bn_momentum);
  std::vector<BlockCache> caches(model.blocks.size());
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    InvertedResidual& b = model.blocks[i];
    BlockCache& c = caches[i];
    Tensor y = x;
    if (b.expand) y = unit_forward(*b.expand, y, c.expand.emplace(), bn_momentum);
    y = unit_forward(b.depthwise, y, c.depthwise, bn_momentum);
    if (b.attention) y = attention_forward(*b.attention, y, c.attention.emplace());
    y = unit_forward(b.project, y, c.project, bn_momentum);
    x = b.residual ? tensor::add(y, x) : std::move(y);
  }
  UnitCache head_cache;
  const Tensor features = unit_forward(model.head, x, head_cache, bn_momentum);
  const Tensor pooled = tensor::global_avg_pool(features);
  const Tensor logits = tensor::linear(pooled, model.classifier.weight, model.classifier.bias);
  tensor::CrossEntropy ce = tensor::softmax_cross_entropy(logits, labels);
  if (!std::isfinite(ce.loss)) throw NumericError("training loss is not finite");

  tensor::LinearGrads lg = tensor::linear_vjp(pooled, model.classifier.weight, ce.grad);
  grads.classifier.weight = std::move(lg.weights);
  grads.classifier.bias = std::move(lg.bias);
  Tensor g = tensor::global_avg_pool_vjp(features.shape(), lg.input);
  g = unit_backward(model.head, grads.head, head_cache, std::move(g));
  for (std::size_t i = model.blocks.size(); i-- > 0;) {
    const InvertedResidual& b = model.blocks[i];
    InvertedResidual& gb = grads.blocks[i];
    const BlockCache& c = caches[i];
    Tensor gy = unit_backward(b.project, gb.project, c.project, g);
    if (b.attention) gy = attention_backward(*b.attention, *gb.attention, *c.attention, gy);
    gy = unit_backward(b.depthwise, gb.depthwise, c.depthwise, std::move(gy));
    if (b.expand) gy = unit_backward(*b.expand, *gb.expand, *c.expand, std::move(gy));
    g = b.residual ? tensor::add(gy, g) : std::move(gy);
  }
  unit_backward(model.stem, grads.stem, stem_cache, std::move(g));
  return ce.loss;
}

Sgd::Sgd(const Model& model, double momentum, double weight_decay)
    : momentum_(momentum), weight_decay_(weight_decay) {
  for (const ConstParamRef& p : model.parameters()) {
    if (p.trainable) velocity_.emplace_back(p.values.size(), 0.0f);
  }
}

void Sgd::step(Model& model, const Model& grads, double lr) {
  std::vector<ParamRef> params = model.parameters();
  const std::vector<ConstParamRef> g = grads.parameters();
  std::size_t v = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable) continue;
    if (g[i].values.size() != params[i].values.size()) {
      throw InvalidArgument("gradient blob " + g[i].name + " has the wrong size");
    }
    std::vector<float>& vel = velocity_.at(v++);
    std::span<float> w = params[i].values;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double grad = g[i].values[k] + weight_decay_ * w[k];
      vel[k] = static_cast<float>(momentum_ * vel[k] + grad);
      w[k] = static_cast<float>(w[k] - lr * vel[k]);
    }
  }
}

double cosine_lr(double base_lr, long step, long total_steps) {
  if (total_steps <= 0) return base_lr;
  const double t = std::clamp(static_cast<double>(step) / total_steps, 0.0, 1.0);
  return 0.5 * base_lr * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace uxai::model
