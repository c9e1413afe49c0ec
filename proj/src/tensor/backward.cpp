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

#include <cmath>

#include "tensor/conv_taps.hpp"
#include "uxai/errors.hpp"
#include "uxai/tensor.hpp"

namespace uxai::tensor {

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw InvalidArgument(std::string(op) + ": upstream shape " + b.to_string() +
                          " != forward shape " + a.to_string());
  }
}

}  // namespace

ConvGrads conv2d_vjp(const Tensor& input, const Tensor& weights,
                     const ConvSpec& spec, const Tensor& upstream) {
  spec.validate();
  const detail::ConvGeometry g(input.shape(), spec);
  require_same_shape({input.n(), spec.out_channels, g.out_h, g.out_w},
                     upstream.shape(), "conv2d_vjp");
  if (weights.shape() != spec.weight_shape()) {
    throw InvalidArgument("conv2d_vjp: weight shape " + weights.shape().to_string());
  }

  ConvGrads grads{Tensor(input.shape()), Tensor(weights.shape()),
                  std::vector<float>(spec.out_channels, 0.0f)};
  for (int co = 0; co < spec.out_channels; ++co) {
    double bias_acc = 0.0;
    for (int n = 0; n < input.n(); ++n) {
      for (float v : upstream.plane(n, co)) bias_acc += v;
    }
    grads.bias[co] = static_cast<float>(bias_acc);
  }
  if (detail::is_pointwise(spec)) {
    detail::pointwise_conv_vjp(input, weights, upstream, grads.input, grads.weights);
    return grads;
  }

  const int cin_per_group = spec.in_channels / spec.groups;
  const int cout_per_group = spec.out_channels / spec.groups;
  for (int co = 0; co < spec.out_channels; ++co) {

    const int group = co / cout_per_group;
    for (int k = 0; k < cin_per_group; ++k) {
      const int ci = group * cin_per_group + k;
      for (int ky = 0; ky < spec.kernel_h; ++ky) {
        for (int kx = 0; kx < spec.kernel_w; ++kx) {
          const float wv = weights.at(co, k, ky, kx);
          double w_acc = 0.0;
          for (int n = 0; n < input.n(); ++n) {
            const float* gout = upstream.plane(n, co).data();
            const float* src = input.plane(n, ci).data();
            float* gin = grads.input.plane(n, ci).data();
            g.for_each_row(ky, kx, [&](int oy, int iy, int ox0, int ox1, int ix0) {
              const float* go = gout + static_cast<std::size_t>(oy) * g.out_w;
              const float* s = src + static_cast<std::size_t>(iy) * g.in_w + ix0;
              float* gi = gin + static_cast<std::size_t>(iy) * g.in_w + ix0;
              float row_acc = 0.0f;
              for (int ox = ox0; ox < ox1; ++ox) {
                const std::size_t off = static_cast<std::size_t>(ox - ox0) * g.stride;
                row_acc += go[ox] * s[off];
                gi[off] += wv * go[ox];
              }
              w_acc += row_acc;
            });
          }
          grads.weights.at(co, k, ky, kx) = static_cast<float>(w_acc);
        }
      }
    }
  }
  return grads;
}

BatchNormGrads batchnorm_infer_vjp(const Tensor& input, const BatchNormParams& bn,
                                   const Tensor& upstream) {
  check_batchnorm(bn, input.c(), /*need_stats=*/true);
  require_same_shape(input.shape(), upstream.shape(), "batchnorm_infer_vjp");
  BatchNormGrads grads{Tensor(input.shape()), std::vector<float>(input.c()),
                       std::vector<float>(input.c())};
  for (int c = 0; c < input.c(); ++c) {
    const float inv = 1.0f / std::sqrt(bn.var[c] + bn.eps);
    double dgamma = 0.0;
    double dbeta = 0.0;
    for (int n = 0; n < input.n(); ++n) {
      std::span<const float> x = input.plane(n, c);
      std::span<const float> gy = upstream.plane(n, c);
      std::span<float> gx = grads.input.plane(n, c);
      for (std::size_t i = 0; i < x.size(); ++i) {
        gx[i] = gy[i] * bn.gamma[c] * inv;
        dgamma += static_cast<double>(gy[i]) * ((x[i] - bn.mean[c]) * inv);
        dbeta += gy[i];
      }
    }
    grads.gamma[c] = static_cast<float>(dgamma);
    grads.beta[c] = static_cast<float>(dbeta);
  }
  return grads;
}

Tensor activation_vjp(const Tensor& input, Activation kind, const Tensor& upstream) {
  require_same_shape(input.shape(), upstream.shape(), "activation_vjp");
  Tensor out(input.shape());
  std::span<const float> x = input.data();
  std::span<const float> gy = upstream.data();
  std::span<float> gx = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    float d = 0.0f;
    switch (kind) {
      case Activation::kRelu:
        d = x[i] > 0.0f ? 1.0f : 0.0f;
        break;
      case Activation::kRelu6:
        d = (x[i] > 0.0f && x[i] < 6.0f) ? 1.0f : 0.0f;
        break;
      case Activation::kHswish:
        if (x[i] <= -3.0f) {
          d = 0.0f;
        } else if (x[i] >= 3.0f) {
          d = 1.0f;
        } else {
          d = (2.0f * x[i] + 3.0f) / 6.0f;
        }
        break;
    }
    gx[i] = gy[i] * d;
  }
  return out;
}

Tensor sigmoid_vjp(const Tensor& output, const Tensor& upstream) {
  require_same_shape(output.shape(), upstream.shape(), "sigmoid_vjp");
  Tensor out(output.shape());
  for (std::size_t i = 0; i < output.size(); ++i) {
    const float s = output.data()[i];
    out.data()[i] = upstream.data()[i] * s * (1.0f - s);
  }
  return out;
}

Tensor global_avg_pool_vjp(const Shape& input_shape, const Tensor& upstream) {
  require_same_shape({input_shape.n, input_shape.c, 1, 1}, upstream.shape(),
                     "global_avg_pool_vjp");
  Tensor out(input_shape);
  const float inv = 1.0f / static_cast<float>(input_shape.plane());
  for (int n = 0; n < input_shape.n; ++n) {
    for (int c = 0; c < input_shape.c; ++c) {
      const float g = upstream.at(n, c, 0, 0) * inv;
      for (float& v : out.plane(n, c)) v = g;
    }
  }
  return out;
}

LinearGrads linear_vjp(const Tensor& input, const Tensor& weights,
                       const Tensor& upstream) {
  const int in_features = input.c() * input.h() * input.w();
  const int out_features = weights.n();
  if (weights.c() != in_features || weights.h() != 1 || weights.w() != 1) {
    throw InvalidArgument("linear_vjp: weights " + weights.shape().to_string() +
                          " incompatible with input " + input.shape().to_string());
  }
  require_same_shape({input.n(), out_features, 1, 1}, upstream.shape(), "linear_vjp");

  LinearGrads grads{Tensor(input.shape()), Tensor(weights.shape()),
                    std::vector<float>(out_features, 0.0f)};
  const float* x = input.data().data();
  const float* w = weights.data().data();
  const float* gy = upstream.data().data();
  float* gx = grads.input.data().data();
  float* gw = grads.weights.data().data();
  for (int n = 0; n < input.n(); ++n) {
    float* gxr = gx + static_cast<std::size_t>(n) * in_features;
    for (int i = 0; i < in_features; ++i) {
      double acc = 0.0;
      for (int o = 0; o < out_features; ++o) {
        acc += static_cast<double>(gy[n * out_features + o]) *
               w[static_cast<std::size_t>(o) * in_features + i];
      }
      gxr[i] = static_cast<float>(acc);
    }
  }
  for (int o = 0; o < out_features; ++o) {
    double bias_acc = 0.0;
    for (int n = 0; n < input.n(); ++n) bias_acc += gy[n * out_features + o];
    grads.bias[o] = static_cast<float>(bias_acc);
    for (int i = 0; i < in_features; ++i) {
      double acc = 0.0;
      for (int n = 0; n < input.n(); ++n) {
        acc += static_cast<double>(gy[n * out_features + o]) *
               x[static_cast<std::size_t>(n) * in_features + i];
      }
      gw[static_cast<std::size_t>(o) * in_features + i] = static_cast<float>(acc);
    }
  }
  return grads;
}

ScaleGrads scale_channels_vjp(const Tensor& input, const Tensor& gate,
                              const Tensor& upstream) {
  require_same_shape(input.shape(), upstream.shape(), "scale_channels_vjp");
  ScaleGrads grads{Tensor(input.shape()), Tensor(gate.shape())};
  for (int n = 0; n < input.n(); ++n) {
    for (int c = 0; c < input.c(); ++c) {
      const float s = gate.at(n, c, 0, 0);
      std::span<const float> x = input.plane(n, c);
      std::span<const float> gy = upstream.plane(n, c);
      std::span<float> gx = grads.input.plane(n, c);
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        gx[i] = gy[i] * s;
        acc += static_cast<double>(gy[i]) * x[i];
      }
      grads.gate.at(n, c, 0, 0) = static_cast<float>(acc);
    }
  }
  return grads;
}

BatchNormGrads batchnorm_train_vjp(const BatchNormBatchStats& stats,
                                   const BatchNormParams& bn, const Tensor& upstream) {
  const Tensor& xh = stats.normalized;
  require_same_shape(xh.shape(), upstream.shape(), "batchnorm_train_vjp");
  const int channels = xh.c();
  const double count = static_cast<double>(xh.n()) * xh.shape().plane();
  BatchNormGrads grads{Tensor(xh.shape()), std::vector<float>(channels),
                       std::vector<float>(channels)};
  for (int c = 0; c < channels; ++c) {
    double sum_g = 0.0;
    double sum_gx = 0.0;
    for (int n = 0; n < xh.n(); ++n) {
      std::span<const float> gy = upstream.plane(n, c);
      std::span<const float> x = xh.plane(n, c);
      for (std::size_t i = 0; i < x.size(); ++i) {
        sum_g += gy[i];
        sum_gx += static_cast<double>(gy[i]) * x[i];
      }
    }
    grads.beta[c] = static_cast<float>(sum_g);
    grads.gamma[c] = static_cast<float>(sum_gx);
    const double inv = 1.0 / std::sqrt(static_cast<double>(stats.var[c]) + bn.eps);
    const double scale = bn.gamma[c] * inv / count;
    for (int n = 0; n < xh.n(); ++n) {
      std::span<const float> gy = upstream.plane(n, c);
      std::span<const float> x = xh.plane(n, c);
      std::span<float> gx = grads.input.plane(n, c);
      for (std::size_t i = 0; i < x.size(); ++i) {
        gx[i] = static_cast<float>(scale * (count * gy[i] - sum_g - x[i] * sum_gx));
      }
    }
  }
  return grads;
}

Tensor vjp(const OpRecord& record, const Tensor& upstream) {
  auto need_input = [&](const char* op) -> const Tensor& {
    if (!record.input) {
      throw InvalidState(std::string(op) + ": forward input was not cached");
    }
    return *record.input;
  };
  auto need_weights = [&](const char* op) -> const Tensor& {
    if (!record.weights) {
      throw InvalidState(std::string(op) + ": forward weights were not cached");
    }
    return *record.weights;
  };

  switch (record.kind) {
    case OpKind::kConv2d:
      return conv2d_vjp(need_input("conv2d"), need_weights("conv2d"), record.conv,
                        upstream)
          .input;
    case OpKind::kBatchNormInfer:
      return batchnorm_infer_vjp(need_input("batchnorm_infer"), record.bn, upstream)
          .input;
    case OpKind::kActivation:
      return activation_vjp(need_input("activation"), record.act, upstream);
    case OpKind::kGlobalAvgPool:
      return global_avg_pool_vjp(need_input("global_avg_pool").shape(), upstream);
    case OpKind::kLinear:
      return linear_vjp(need_input("linear"), need_weights("linear"), upstream).input;
    case OpKind::kSoftmaxCrossEntropy: {
      const Tensor& logits = need_input("softmax_cross_entropy");
      if (record.labels.empty()) {
        throw InvalidState("softmax_cross_entropy: labels were not cached");
      }
      if (upstream.size() != 1) {
        throw InvalidArgument("softmax_cross_entropy: upstream must be a scalar");
      }
      Tensor g = softmax_cross_entropy(logits, record.labels).grad;
      const float scale = upstream.data()[0];
      for (float& v : g.data()) v *= scale;
      return g;
    }
  }
  throw InvalidState("vjp: unknown op kind");
}

}  // namespace uxai::tensor
