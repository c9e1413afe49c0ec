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

// Dense NCHW tensors and the forward/backward kernels the classifier
// is assembled from. Every function here is pure: inputs are never modified
// and identical inputs give bitwise-identical outputs.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace uxai::tensor {

struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

void check_extents(const Shape& shape);

// Rank-4 array, row-major with w fastest. All extents are >= 1. The engine
// runs on float; the double instantiation exists for numerical checks.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() : BasicTensor(Shape{}) {}
  explicit BasicTensor(Shape shape, T fill = T(0)) : shape_(shape) {
    check_extents(shape_);
    data_.assign(shape_.numel(), fill);
  }
  BasicTensor(Shape shape, std::vector<T> data);

  template <typename U>
  static BasicTensor cast(const BasicTensor<U>& other) {
    std::vector<T> data(other.data().begin(), other.data().end());
    return BasicTensor(other.shape(), std::move(data));
  }

  const Shape& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) *
               shape_.w +
           w;
  }
  T& at(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  T at(int n, int c, int h, int w) const { return data_[offset(n, c, h, w)]; }

  // The h*w plane of channel c in batch row n.
  std::span<T> plane(int n, int c) {
    return {data_.data() + offset(n, c, 0, 0), shape_.plane()};
  }
  std::span<const T> plane(int n, int c) const {
    return {data_.data() + offset(n, c, 0, 0), shape_.plane()};
  }

  // Batch row n as a (1, c, h, w) tensor.
  BasicTensor row(int n) const;

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

struct ConvSpec {
  int in_channels = 1;
  int out_channels = 1;
  int kernel_h = 3;
  int kernel_w = 3;
  int stride = 1;
  int padding = 0;
  int groups = 1;

  void validate() const;
  Shape weight_shape() const {
    return {out_channels, in_channels / groups, kernel_h, kernel_w};
  }
  int output_extent(int in, int kernel) const {
    return (in + 2 * padding - kernel) / stride + 1;
  }

  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

template <typename T>
struct BasicBatchNorm {
  std::vector<T> mean;
  std::vector<T> var;
  std::vector<T> gamma;
  std::vector<T> beta;
  T eps = T(1e-5);
};
using BatchNormParams = BasicBatchNorm<float>;

enum class Activation { kRelu, kRelu6, kHswish };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation kind);

// Stacks equally-shaped single-row tensors along the batch axis.
Tensor stack(std::span<const Tensor> rows);

// ---------------------------------------------------------------------------
// Forward kernels. Instantiated for float and double.

template <typename T>
using SpanOf = std::type_identity_t<std::span<const T>>;

// Direct grouped cross-correlation. `bias` may be empty (no bias) or have
// out_channels entries.
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                      SpanOf<T> bias, const ConvSpec& spec);

template <typename T>
BasicTensor<T> batchnorm_infer(const BasicTensor<T>& input,
                               const BasicBatchNorm<T>& bn);

template <typename T>
T activation(T x, Activation kind);
template <typename T>
BasicTensor<T> activation(const BasicTensor<T>& input, Activation kind);

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input);

// (n, c, h, w) -> (n, c, 1, 1). Sums accumulate in double.
template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input);

// Weights are (out, in, 1, 1); the input is flattened per batch row and must
// have `in` features. Output is (n, out, 1, 1).
template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                      SpanOf<T> bias);

// Multiplies every plane (n, c) of `input` by gate(n, c, 0, 0).
template <typename T>
BasicTensor<T> scale_channels(const BasicTensor<T>& input,
                              const BasicTensor<T>& gate);

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);

// Max-subtracted softmax evaluated in double precision.
template <typename T>
std::vector<double> softmax(std::span<const T> logits);
inline std::vector<double> softmax(const std::vector<float>& logits) {
  return softmax<float>(std::span<const float>(logits));
}

// Mean softmax cross-entropy over the batch; `grad` is dL/dlogits.
template <typename T>
struct BasicCrossEntropy {
  double loss = 0.0;
  BasicTensor<T> grad;
};
using CrossEntropy = BasicCrossEntropy<float>;
template <typename T>
BasicCrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits,
                                           std::span<const int> labels);

// Training-mode batch normalisation over (n, h, w) per channel. Only gamma,
// beta and eps of `bn` are read.
template <typename T>
struct BasicBatchStats {
  std::vector<T> mean;
  std::vector<T> var;  // biased
  BasicTensor<T> normalized;
};
using BatchNormBatchStats = BasicBatchStats<float>;
template <typename T>
BasicTensor<T> batchnorm_train(const BasicTensor<T>& input,
                               const BasicBatchNorm<T>& bn,
                               BasicBatchStats<T>& stats);

// ---------------------------------------------------------------------------
// Backward (vector-Jacobian) companions. Each takes the cached forward
// input(s) and dL/d(output) and returns dL/d(input) plus parameter gradients.

struct ConvGrads {
  Tensor input;
  Tensor weights;
  std::vector<float> bias;
};
ConvGrads conv2d_vjp(const Tensor& input, const Tensor& weights,
                     const ConvSpec& spec, const Tensor& upstream);

struct BatchNormGrads {
  Tensor input;
  std::vector<float> gamma;
  std::vector<float> beta;
};
BatchNormGrads batchnorm_infer_vjp(const Tensor& input,
                                   const BatchNormParams& bn,
                                   const Tensor& upstream);

// Derivative masks: relu' = [x > 0]; relu6' = [0 < x < 6];
// hswish' = 0 for x <= -3, 1 for x >= 3, (2x + 3) / 6 between.
Tensor activation_vjp(const Tensor& input, Activation kind,
                      const Tensor& upstream);

// Takes the forward *output* of the sigmoid.
Tensor sigmoid_vjp(const Tensor& output, const Tensor& upstream);

Tensor global_avg_pool_vjp(const Shape& input_shape, const Tensor& upstream);

struct LinearGrads {
  Tensor input;
  Tensor weights;
  std::vector<float> bias;
};
LinearGrads linear_vjp(const Tensor& input, const Tensor& weights,
                       const Tensor& upstream);

struct ScaleGrads {
  Tensor input;
  Tensor gate;
};
ScaleGrads scale_channels_vjp(const Tensor& input, const Tensor& gate,
                              const Tensor& upstream);

BatchNormGrads batchnorm_train_vjp(const BatchNormBatchStats& stats,
                                   const BatchNormParams& bn,
                                   const Tensor& upstream);

// ---------------------------------------------------------------------------
// Uniform entry point over recorded forward calls.

enum class OpKind {
  kConv2d,
  kBatchNormInfer,
  kActivation,
  kGlobalAvgPool,
  kLinear,
  kSoftmaxCrossEntropy,
};

// What a forward call leaves behind for its backward pass. Only the fields
// relevant to `kind` are consulted.
struct OpRecord {
  OpKind kind = OpKind::kConv2d;
  std::optional<Tensor> input;
  std::optional<Tensor> weights;
  ConvSpec conv;
  BatchNormParams bn;
  Activation act = Activation::kRelu;
  std::vector<int> labels;
};

// Returns dL/d(input) of the recorded op. Throws InvalidState when the
// record is missing the cached forward values the op needs.
Tensor vjp(const OpRecord& record, const Tensor& upstream);

}  // namespace uxai::tensor
