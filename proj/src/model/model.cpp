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

#include "uxai/model.hpp"

#include <algorithm>
#include <cmath>

#include "uxai/errors.hpp"
#include "uxai/random.hpp"

namespace uxai::model {

using tensor::Activation;
using tensor::ConvSpec;
using tensor::Shape;
using tensor::Tensor;

namespace {

using json = nlohmann::json;

template <typename T>
T read_field(const json& j, const char* name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("config field '") + name + "' has the wrong type");
  }
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw InvalidArgument("config field '" + field + "' " + why);
}

std::vector<BlockConfig> reference_blocks() {
  // expansion, out_channels, stride, residual, attention
  std::vector<BlockConfig> b = {
      {1, 16, 1, true, false},  {6, 24, 2, false, false}, {6, 24, 1, true, false},
      {6, 32, 2, false, true},  {6, 32, 1, true, true},   {6, 32, 1, true, true},
      {6, 64, 2, false, false}, {6, 64, 1, true, false},  {6, 64, 1, true, false},
      {6, 64, 1, true, false},  {6, 96, 1, false, true},  {6, 96, 1, true, true},
      {6, 96, 1, true, true},   {6, 160, 2, false, true}, {6, 160, 1, true, true},
      {6, 160, 1, true, true},  {6, 320, 1, false, false},
  };
  return b;
}

Conv2dLayer make_conv(const ConvSpec& spec, Rng& rng) {
  spec.validate();
  Conv2dLayer layer{spec, Tensor(spec.weight_shape()),
                    std::vector<float>(static_cast<std::size_t>(spec.out_channels), 0.0f)};
  const double fan_in =
      static_cast<double>(spec.in_channels / spec.groups) * spec.kernel_h * spec.kernel_w;
  const double sd = std::sqrt(2.0 / fan_in);
  for (float& v : layer.weight.data()) v = static_cast<float>(sd * rng.normal());
  return layer;
}

BatchNormLayer make_bn(int channels) {
  const auto c = static_cast<std::size_t>(channels);
  BatchNormLayer bn;
  bn.params.mean.assign(c, 0.0f);
  bn.params.var.assign(c, 1.0f);
  bn.params.gamma.assign(c, 1.0f);
  bn.params.beta.assign(c, 0.0f);
  return bn;
}

LinearLayer make_linear(int in, int out, Rng& rng) {
  LinearLayer layer{Tensor({out, in, 1, 1}),
                    std::vector<float>(static_cast<std::size_t>(out), 0.0f)};
  const double sd = std::sqrt(1.0 / in);
  for (float& v : layer.weight.data()) v = static_cast<float>(sd * rng.normal());
  return layer;
}

ConvUnit make_unit(int in, int out, int kernel, int stride, int groups,
                   std::optional<Activation> act, Rng& rng) {
  ConvSpec spec{in, out, kernel, kernel, stride, kernel / 2, groups};
  return ConvUnit{make_conv(spec, rng), make_bn(out), act};
}

// Visits every blob in declaration order. The const and mutable parameter
// listings share this so their order cannot drift apart.
template <typename M, typename Fn>
void visit_blobs(M& m, Fn&& fn) {
  auto conv = [&](const std::string& p, auto& layer) {
    fn(p + ".weight", layer.weight.shape(), layer.weight.data(), true);
    fn(p + ".bias", Shape{static_cast<int>(layer.bias.size()), 1, 1, 1},
       std::span(layer.bias), true);
  };
  auto bn = [&](const std::string& p, auto& layer) {
    auto& q = layer.params;
    const Shape s{static_cast<int>(q.gamma.size()), 1, 1, 1};
    fn(p + ".gamma", s, std::span(q.gamma), true);
    fn(p + ".beta", s, std::span(q.beta), true);
    fn(p + ".running_mean", s, std::span(q.mean), false);
    fn(p + ".running_var", s, std::span(q.var), false);
  };
  auto unit = [&](const std::string& p, auto& u) {
    conv(p + ".conv", u.conv);
    bn(p + ".bn", u.bn);
  };
  unit("stem", m.stem);
  for (std::size_t i = 0; i < m.blocks.size(); ++i) {
    auto& b = m.blocks[i];
    const std::string p = "blocks." + std::to_string(i);
    if (b.expand) unit(p + ".expand", *b.expand);
    unit(p + ".depthwise", b.depthwise);
    if (b.attention) {
      conv(p + ".attention.reduce", b.attention->reduce);
      conv(p + ".attention.expand", b.attention->expand);
    }
    unit(p + ".project", b.project);
  }
  unit("head", m.head);
  conv("classifier", m.classifier);
}

}  // namespace

int ArchitectureConfig::scaled(int channels) const {
  constexpr int kDivisor = 8;
  const double target = channels * width_multiplier;
  int rounded = static_cast<int>(target + kDivisor / 2.0) / kDivisor * kDivisor;
  rounded = std::max(kDivisor, rounded);
  if (rounded < 0.9 * target) rounded += kDivisor;
  return rounded;
}

void ArchitectureConfig::validate() const {
  require(input_size > 0, "input_size", "must be positive");
  require(num_classes >= 2, "num_classes", "must be at least 2");
  require(std::isfinite(width_multiplier) && width_multiplier > 0.0, "width_multiplier",
          "must be a positive finite number");
  require(stem_channels > 0, "stem_channels", "must be positive");
  require(attention_reduction > 0, "attention_reduction", "must be positive");
  require(head_channels > 0, "head_channels", "must be positive");
  require(!blocks.empty(), "blocks", "must not be empty");
  int stride_product = 2;
  int in = scaled(stem_channels);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const BlockConfig& b = blocks[i];
    const std::string p = "blocks[" + std::to_string(i) + "].";
    require(b.expansion >= 1, p + "expansion", "must be at least 1");
    require(b.out_channels > 0, p + "out_channels", "must be positive");
    require(b.stride == 1 || b.stride == 2, p + "stride", "must be 1 or 2");
    const int out = scaled(b.out_channels);
    require(!b.use_residual || (b.stride == 1 && in == out), p + "use_residual",
            "requires stride 1 and matching channel counts");
    stride_product *= b.stride;
    in = out;
  }
  require(input_size % stride_product == 0, "input_size",
          "must be divisible by the total stride " + std::to_string(stride_product));
}

nlohmann::json ArchitectureConfig::to_json() const {
  json blocks_json = json::array();
  for (const BlockConfig& b : blocks) {
    blocks_json.push_back({{"expansion", b.expansion},
                           {"out_channels", b.out_channels},
                           {"stride", b.stride},
                           {"use_residual", b.use_residual},
                           {"use_attention", b.use_attention}});
  }
  return {{"input_size", input_size},
          {"num_classes", num_classes},
          {"width_multiplier", width_multiplier},
          {"stem_channels", stem_channels},
          {"attention_reduction", attention_reduction},
          {"head_channels", head_channels},
          {"blocks", blocks_json}};
}

ArchitectureConfig ArchitectureConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ArchitectureConfig c;
  c.input_size = read_field(j, "input_size", c.input_size);
  c.num_classes = read_field(j, "num_classes", c.num_classes);
  c.width_multiplier = read_field(j, "width_multiplier", c.width_multiplier);
  c.stem_channels = read_field(j, "stem_channels", c.stem_channels);
  c.attention_reduction = read_field(j, "attention_reduction", c.attention_reduction);
  c.head_channels = read_field(j, "head_channels", c.head_channels);
  if (j.contains("blocks")) {
    const json& arr = j.at("blocks");
    if (!arr.is_array()) throw InvalidArgument("config field 'blocks' must be an array");
    for (const json& item : arr) {
      if (!item.is_object()) {
        throw InvalidArgument("config field 'blocks' must contain objects");
      }
      BlockConfig b;
      b.expansion = read_field(item, "expansion", b.expansion);
      b.out_channels = read_field(item, "out_channels", b.out_channels);
      b.stride = read_field(item, "stride", b.stride);
      b.use_residual = read_field(item, "use_residual", b.use_residual);
      b.use_attention = read_field(item, "use_attention", b.use_attention);
      c.blocks.push_back(b);
    }
  }
  c.validate();
  return c;
}

ArchitectureConfig reference_config() {
  ArchitectureConfig c;
  c.input_size = 224;
  c.num_classes = 10;
  c.width_multiplier = 0.75;
  c.stem_channels = 16;
  c.blocks = reference_blocks();
  c.attention_reduction = 4;
  c.head_channels = 1632;
  return c;
}

ArchitectureConfig student_config() {
  ArchitectureConfig c = reference_config();
  c.input_size = 64;
  c.width_multiplier = 0.375;
  return c;
}

std::vector<std::string> default_labels(int num_classes) {
  std::vector<std::string> labels;
  for (int i = 0; i < num_classes; ++i) labels.push_back("class_" + std::to_string(i));
  return labels;
}

std::int64_t count_parameters(const Conv2dLayer& layer) {
  return static_cast<std::int64_t>(layer.weight.size() + layer.bias.size());
}

std::int64_t count_parameters(const BatchNormLayer& layer) {
  return static_cast<std::int64_t>(layer.params.gamma.size() + layer.params.beta.size());
}

std::int64_t count_parameters(const LinearLayer& layer) {
  return static_cast<std::int64_t>(layer.weight.size() + layer.bias.size());
}

Model Model::build(const ArchitectureConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  Model m;
  m.config_ = config;
  m.labels_ = default_labels(config.num_classes);

  int in = config.scaled(config.stem_channels);
  m.stem = make_unit(3, in, 3, 2, 1, Activation::kHswish, rng);
  for (const BlockConfig& bc : config.blocks) {
    const int out = config.scaled(bc.out_channels);
    const int hidden = in * bc.expansion;
    InvertedResidual b;
    if (bc.expansion != 1) b.expand = make_unit(in, hidden, 1, 1, 1, Activation::kHswish, rng);
    b.depthwise = make_unit(hidden, hidden, 3, bc.stride, hidden, Activation::kHswish, rng);
    if (bc.use_attention) {
      const int squeezed = std::max(1, hidden / config.attention_reduction);
      SqueezeExcite se;
      se.reduce = make_linear(hidden, squeezed, rng);
      se.expand = make_linear(squeezed, hidden, rng);
      b.attention = std::move(se);
    }
    b.project = make_unit(hidden, out, 1, 1, 1, std::nullopt, rng);
    b.residual = bc.use_residual;
    m.blocks.push_back(std::move(b));
    in = out;
  }
  const int head = config.scaled(config.head_channels);
  m.head = make_unit(in, head, 1, 1, 1, Activation::kHswish, rng);
  m.classifier = make_linear(head, config.num_classes, rng);
  return m;
}

void Model::set_labels(std::vector<std::string> labels) {
  if (labels.size() != static_cast<std::size_t>(config_.num_classes)) {
    throw InvalidArgument("label count " + std::to_string(labels.size()) +
                          " != num_classes " + std::to_string(config_.num_classes));
  }
  labels_ = std::move(labels);
}

void Model::check_input(const Tensor& batch) const {
  const int s = config_.input_size;
  if (batch.c() != 3 || batch.h() != s || batch.w() != s) {
    throw InvalidArgument("model input must be (n, 3, " + std::to_string(s) + ", " +
                          std::to_string(s) + "), got " + batch.shape().to_string());
  }
}

Tensor run_unit(const ConvUnit& unit, const Tensor& x) {
  Tensor y = tensor::conv2d(x, unit.conv.weight, unit.conv.bias, unit.conv.spec);
  y = tensor::batchnorm_infer(y, unit.bn.params);
  if (unit.act) y = tensor::activation(y, *unit.act);
  return y;
}

Tensor run_attention(const SqueezeExcite& se, const Tensor& x) {
  Tensor s = tensor::global_avg_pool(x);
  s = tensor::linear(s, se.reduce.weight, se.reduce.bias);
  s = tensor::activation(s, Activation::kRelu);
  s = tensor::linear(s, se.expand.weight, se.expand.bias);
  s = tensor::sigmoid(s);
  return tensor::scale_channels(x, s);
}

Tensor run_block(const InvertedResidual& block, const Tensor& x) {
  Tensor y = block.expand ? run_unit(*block.expand, x) : x;
  y = run_unit(block.depthwise, y);
  if (block.attention) y = run_attention(*block.attention, y);
  y = run_unit(block.project, y);
  if (block.residual) y = tensor::add(y, x);
  return y;
}

Tensor Model::features(const Tensor& batch) const {
  check_input(batch);
  Tensor x = run_unit(stem, batch);
  for (const InvertedResidual& b : blocks) x = run_block(b, x);
  return run_unit(head, x);
}

Tensor Model::classify(const Tensor& features) const {
  return tensor::linear(tensor::global_avg_pool(features), classifier.weight,
                        classifier.bias);
}

Tensor Model::logits(const Tensor& batch) const { return classify(features(batch)); }

PredictionResult make_prediction(std::span<const float> logits,
                                 const std::vector<std::string>& labels) {
  PredictionResult r;
  r.probabilities = tensor::softmax<float>(logits);
  const auto it = std::max_element(r.probabilities.begin(), r.probabilities.end());
  r.top1_index = static_cast<int>(it - r.probabilities.begin());
  r.confidence = *it;
  if (r.top1_index < static_cast<int>(labels.size())) r.top1_label = labels[r.top1_index];
  return r;
}

std::vector<PredictionResult> Model::predict(const Tensor& batch) const {
  const Tensor z = logits(batch);
  const auto k = static_cast<std::size_t>(config_.num_classes);
  std::vector<PredictionResult> out;
  out.reserve(static_cast<std::size_t>(batch.n()));
  for (int n = 0; n < batch.n(); ++n) {
    out.push_back(make_prediction(z.data().subspan(n * k, k), labels_));
  }
  return out;
}

TargetActivations Model::grad_wrt_target_activations(const Tensor& input,
                                                     int class_index) const {
  if (class_index < 0 || class_index >= config_.num_classes) {
    throw InvalidArgument("class_index " + std::to_string(class_index) +
                          " outside [0, " + std::to_string(config_.num_classes) + ")");
  }
  if (input.n() != 1) {
    throw InvalidArgument("grad_wrt_target_activations expects a single-image batch, got " +
                          input.shape().to_string());
  }
  TargetActivations t;
  t.activations = features(input);
  const Tensor pooled = tensor::global_avg_pool(t.activations);
  Tensor upstream({1, config_.num_classes, 1, 1});
  upstream.at(0, class_index, 0, 0) = 1.0f;
  const tensor::LinearGrads lg = tensor::linear_vjp(pooled, classifier.weight, upstream);
  t.gradients = tensor::global_avg_pool_vjp(t.activations.shape(), lg.input);
  return t;
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> refs;
  visit_blobs(*this, [&](std::string name, Shape shape, std::span<float> v, bool trainable) {
    refs.push_back({std::move(name), shape, v, trainable});
  });
  return refs;
}

std::vector<ConstParamRef> Model::parameters() const {
  std::vector<ConstParamRef> refs;
  visit_blobs(*this,
              [&](std::string name, Shape shape, std::span<const float> v, bool trainable) {
                refs.push_back({std::move(name), shape, v, trainable});
              });
  return refs;
}

std::int64_t Model::count_parameters() const {
  std::int64_t total = 0;
  for (const ConstParamRef& p : parameters()) {
    if (p.trainable) total += static_cast<std::int64_t>(p.values.size());
  }
  return total;
}

std::int64_t count_parameters(const Model& model) { return model.count_parameters(); }

}  // namespace uxai::model
