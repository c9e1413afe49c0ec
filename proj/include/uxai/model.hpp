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

// The hybrid mobile classifier: inverted-residual depthwise-separable blocks
// with identity skips and optional squeeze-and-excitation channel attention.
//
//   stem 3x3/2 conv -> blocks -> head 1x1 conv -> global average pool
//   -> linear(num_classes)
//
// The head conv (with its BN and activation) is the Grad-CAM target layer.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uxai/tensor.hpp"

namespace uxai::model {

struct BlockConfig {
  int expansion = 6;
  int out_channels = 16;
  int stride = 1;
  bool use_residual = false;
  bool use_attention = false;

  friend bool operator==(const BlockConfig&, const BlockConfig&) = default;
};

struct ArchitectureConfig {
  int input_size = 224;
  int num_classes = 10;
  double width_multiplier = 1.0;
  int stem_channels = 16;
  std::vector<BlockConfig> blocks;
  int attention_reduction = 4;
  int head_channels = 1280;

  // Channel count after applying the width multiplier: rounded to the
  // nearest multiple of 8, at least 8, and never below 90% of the target.
  int scaled(int channels) const;

  // Throws InvalidArgument naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  static ArchitectureConfig from_json(const nlohmann::json& j);

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

// The shipped configuration; its parameter count sits within 2% of 2.24M.
ArchitectureConfig reference_config();

// Reference block pattern at half the width multiplier, for 64x64 inputs.
ArchitectureConfig student_config();

struct Normalization {
  std::array<float, 3> mean = {0.485f, 0.456f, 0.406f};
  std::array<float, 3> stddev = {0.229f, 0.224f, 0.225f};

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

std::vector<std::string> default_labels(int num_classes);

// ---------------------------------------------------------------------------
// Layers.

struct Conv2dLayer {
  tensor::ConvSpec spec;
  tensor::Tensor weight;
  std::vector<float> bias;
};

struct BatchNormLayer {
  tensor::BatchNormParams params;
};

struct LinearLayer {
  tensor::Tensor weight;  // (out, in, 1, 1)
  std::vector<float> bias;
};

// conv -> BN -> optional activation.
struct ConvUnit {
  Conv2dLayer conv;
  BatchNormLayer bn;
  std::optional<tensor::Activation> act;
};

// GAP -> linear -> relu -> linear -> sigmoid, used as a per-channel gate.
struct SqueezeExcite {
  LinearLayer reduce;
  LinearLayer expand;
};

struct InvertedResidual {
  std::optional<ConvUnit> expand;  // absent when expansion == 1
  ConvUnit depthwise;
  std::optional<SqueezeExcite> attention;
  ConvUnit project;  // linear bottleneck, no activation
  bool residual = false;
};

std::int64_t count_parameters(const Conv2dLayer& layer);
std::int64_t count_parameters(const BatchNormLayer& layer);
std::int64_t count_parameters(const LinearLayer& layer);

// A named view of one parameter blob. Running BN statistics are exposed as
// non-trainable blobs so checkpoints capture them.
struct ParamRef {
  std::string name;
  tensor::Shape shape;
  std::span<float> values;
  bool trainable = true;
};

struct ConstParamRef {
  std::string name;
  tensor::Shape shape;
  std::span<const float> values;
  bool trainable = true;
};

struct PredictionResult {
  std::vector<double> probabilities;
  int top1_index = 0;
  std::string top1_label;
  double confidence = 0.0;
};

struct TargetActivations {
  tensor::Tensor activations;  // head output A, (1, K, h', w')
  tensor::Tensor gradients;    // d z_c / dA, same shape
};

class Model {
 public:
  static Model build(const ArchitectureConfig& config, std::uint64_t seed);

  const ArchitectureConfig& config() const { return config_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Normalization& normalization() const { return norm_; }
  void set_labels(std::vector<std::string> labels);
  void set_normalization(const Normalization& norm) { norm_ = norm; }

  // Head activations A for a preprocessed batch.
  tensor::Tensor features(const tensor::Tensor& batch) const;
  // Pre-softmax class scores, (n, num_classes, 1, 1).
  tensor::Tensor logits(const tensor::Tensor& batch) const;
  tensor::Tensor classify(const tensor::Tensor& features) const;

  // One result per batch row. Ties resolve to the lowest class index.
  std::vector<PredictionResult> predict(const tensor::Tensor& batch) const;

  // Head activations and the gradient of logit `class_index` with respect
  // to them, for a single-image batch.
  TargetActivations grad_wrt_target_activations(const tensor::Tensor& input,
                                                int class_index) const;

  std::vector<ParamRef> parameters();
  std::vector<ConstParamRef> parameters() const;
  std::int64_t count_parameters() const;

  // Validates shape/channels of a preprocessed batch.
  void check_input(const tensor::Tensor& batch) const;

  ConvUnit stem;
  std::vector<InvertedResidual> blocks;
  ConvUnit head;
  LinearLayer classifier;

 private:
  ArchitectureConfig config_;
  std::vector<std::string> labels_;
  Normalization norm_;
};

std::int64_t count_parameters(const Model& model);

// Forward of a single unit in inference mode.
tensor::Tensor run_unit(const ConvUnit& unit, const tensor::Tensor& x);
tensor::Tensor run_attention(const SqueezeExcite& se, const tensor::Tensor& x);
tensor::Tensor run_block(const InvertedResidual& block, const tensor::Tensor& x);

PredictionResult make_prediction(std::span<const float> logits,
                                 const std::vector<std::string>& labels);

}  // namespace uxai::model
