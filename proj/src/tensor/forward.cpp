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

#include <algorithm>
#include <cmath>
#include <limits>

#include "tensor/conv_taps.hpp"
#include "uxai/errors.hpp"
#include "uxai/tensor.hpp"

namespace uxai::tensor {

namespace {

template <typename T>
void check_conv_operands(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                         std::span<const T> bias, const ConvSpec& spec) {
  spec.validate();
  if (input.c() != spec.in_channels) {
    throw InvalidArgument("conv2d: input channels " + std::to_string(input.c()) +
                          " != in_channels " + std::to_string(spec.in_channels));
  }
  const Shape expected = spec.weight_shape();
  const Shape& got = weights.shape();
  if (got.n != expected.n) {
    throw InvalidArgument("conv2d: weight out_channels " + std::to_string(got.n) +
                          " != " + std::to_string(expected.n));
  }
  if (got.c != expected.c) {
    throw InvalidArgument("conv2d: weight in_channels/groups " +
                          std::to_string(got.c) + " != " + std::to_string(expected.c));
  }
  if (got.h != expected.h || got.w != expected.w) {
    throw InvalidArgument("conv2d: weight kernel " + std::to_string(got.h) + "x" +
                          std::to_string(got.w) + " != " + std::to_string(expected.h) +
                          "x" + std::to_string(expected.w));
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(spec.out_channels)) {
    throw InvalidArgument("conv2d: bias length " + std::to_string(bias.size()) +
                          " != out_channels " + std::to_string(spec.out_channels));
  }
  if (spec.output_extent(input.h(), spec.kernel_h) < 1) {
    throw InvalidArgument("conv2d: input height " + std::to_string(input.h()) +
                          " too small for kernel");
  }
  if (spec.output_extent(input.w(), spec.kernel_w) < 1) {
    throw InvalidArgument("conv2d: input width " + std::to_string(input.w()) +
                          " too small for kernel");
  }
}

template <typename T>
void check_channel_vector(const std::vector<T>& v, int channels, const char* what) {
  if (v.size() != static_cast<std::size_t>(channels)) {
    throw InvalidArgument(std::string("batchnorm: ") + what + " length " +
                          std::to_string(v.size()) + " != channels " +
                          std::to_string(channels));
  }
}

}  // namespace

template <typename T>
void check_batchnorm(const BasicBatchNorm<T>& bn, int channels, bool need_stats) {
  if (need_stats) {
    check_channel_vector(bn.mean, channels, "mean");
    check_channel_vector(bn.var, channels, "var");
  }
  check_channel_vector(bn.gamma, channels, "gamma");
  check_channel_vector(bn.beta, channels, "beta");
  if (!(bn.eps > T(0))) throw InvalidArgument("batchnorm: eps must be > 0");
}
template void check_batchnorm(const BasicBatchNorm<float>&, int, bool);

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                      SpanOf<T> bias, const ConvSpec& spec) {
  check_conv_operands(input, weights, bias, spec);
  const detail::ConvGeometry g(input.shape(), spec);
  BasicTensor<T> out({input.n(), spec.out_channels, g.out_h, g.out_w});
  if (detail::is_pointwise(spec)) {
    detail::pointwise_conv<T>(input, weights, bias, out);
    return out;
  }
  const int cin_per_group = spec.in_channels / spec.groups;
  const int cout_per_group = spec.out_channels / spec.groups;

  for (int n = 0; n < input.n(); ++n) {
    for (int co = 0; co < spec.out_channels; ++co) {
      std::span<T> dst = out.plane(n, co);
      std::fill(dst.begin(), dst.end(), bias.empty() ? T(0) : bias[co]);
      const int group = co / cout_per_group;
      for (int k = 0; k < cin_per_group; ++k) {
        const int ci = group * cin_per_group + k;
        const T* src = input.plane(n, ci).data();
        for (int ky = 0; ky < spec.kernel_h; ++ky) {
          for (int kx = 0; kx < spec.kernel_w; ++kx) {
            const T wv = weights.at(co, k, ky, kx);
            g.for_each_row(ky, kx, [&](int oy, int iy, int ox0, int ox1, int ix0) {
              T* d = dst.data() + static_cast<std::size_t>(oy) * g.out_w;
              const T* s = src + static_cast<std::size_t>(iy) * g.in_w + ix0;
              if (g.stride == 1) {
                for (int ox = ox0; ox < ox1; ++ox) d[ox] += wv * s[ox - ox0];
              } else {
                for (int ox = ox0; ox < ox1; ++ox) {
                  d[ox] += wv * s[(ox - ox0) * g.stride];
                }
              }
            });
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> batchnorm_infer(const BasicTensor<T>& input, const BasicBatchNorm<T>& bn) {
  check_batchnorm(bn, input.c(), /*need_stats=*/true);
  BasicTensor<T> out(input.shape());
  for (int n = 0; n < input.n(); ++n) {
    for (int c = 0; c < input.c(); ++c) {
      const T inv = T(1) / std::sqrt(bn.var[c] + bn.eps);
      const T mean = bn.mean[c];
      const T gamma = bn.gamma[c];
      const T beta = bn.beta[c];
      std::span<const T> src = input.plane(n, c);
      std::span<T> dst = out.plane(n, c);
      for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = gamma * ((src[i] - mean) * inv) + beta;
      }
    }
  }
  return out;
}

template <typename T>
T activation(T x, Activation kind) {
  switch (kind) {
    case Activation::kRelu:
      return x > T(0) ? x : T(0);
    case Activation::kRelu6:
      return std::min(std::max(x, T(0)), T(6));
    case Activation::kHswish:
      return x * std::min(std::max(x + T(3), T(0)), T(6)) / T(6);
  }
  return x;
}

template <typename T>
BasicTensor<T> activation(const BasicTensor<T>& input, Activation kind) {
  BasicTensor<T> out(input.shape());
  std::span<const T> src = input.data();
  std::span<T> dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = activation(src[i], kind);
  return out;
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.shape());
  std::span<const T> src = input.data();
  std::span<T> dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = T(1) / (T(1) + std::exp(-src[i]));
  return out;
}

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input) {
  BasicTensor<T> out({input.n(), input.c(), 1, 1});
  const double count = static_cast<double>(input.shape().plane());
  for (int n = 0; n < input.n(); ++n) {
    for (int c = 0; c < input.c(); ++c) {
      double sum = 0.0;
      for (T v : input.plane(n, c)) sum += v;
      out.at(n, c, 0, 0) = static_cast<T>(sum / count);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                      SpanOf<T> bias) {
  const int in_features = input.c() * input.h() * input.w();
  const int out_features = weights.n();
  if (weights.h() != 1 || weights.w() != 1) {
    throw InvalidArgument("linear: weights must be (out, in, 1, 1), got " +
                          weights.shape().to_string());
  }
  if (weights.c() != in_features) {
    throw InvalidArgument("linear: input features " + std::to_string(in_features) +
                          " != weight in " + std::to_string(weights.c()));
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(out_features)) {
    throw InvalidArgument("linear: bias length " + std::to_string(bias.size()) +
                          " != out " + std::to_string(out_features));
  }
  BasicTensor<T> out({input.n(), out_features, 1, 1});
  const T* x = input.data().data();
  const T* w = weights.data().data();
  for (int n = 0; n < input.n(); ++n) {
    const T* xr = x + static_cast<std::size_t>(n) * in_features;
    for (int o = 0; o < out_features; ++o) {
      const T* wr = w + static_cast<std::size_t>(o) * in_features;
      double acc = bias.empty() ? 0.0 : bias[o];
      for (int i = 0; i < in_features; ++i) acc += static_cast<double>(wr[i]) * xr[i];
      out.at(n, o, 0, 0) = static_cast<T>(acc);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> scale_channels(const BasicTensor<T>& input, const BasicTensor<T>& gate) {
  if (gate.n() != input.n() || gate.c() != input.c() || gate.h() != 1 || gate.w() != 1) {
    throw InvalidArgument("scale_channels: gate shape " + gate.shape().to_string() +
                          " incompatible with " + input.shape().to_string());
  }
  BasicTensor<T> out(input.shape());
  for (int n = 0; n < input.n(); ++n) {
    for (int c = 0; c < input.c(); ++c) {
      const T s = gate.at(n, c, 0, 0);
      std::span<const T> src = input.plane(n, c);
      std::span<T> dst = out.plane(n, c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * s;
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw InvalidArgument("add: shapes " + a.shape().to_string() + " and " +
                          b.shape().to_string() + " differ");
  }
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

template <typename T>
std::vector<double> softmax(std::span<const T> logits) {
  if (logits.empty()) throw InvalidArgument("softmax: empty logits");
  double max_logit = -std::numeric_limits<double>::infinity();
  for (T z : logits) {
    if (std::isnan(z)) throw InvalidArgument("softmax: NaN logit");
    if (!std::isfinite(z)) throw InvalidArgument("softmax: non-finite logit");
    max_logit = std::max(max_logit, static_cast<double>(z));
  }
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - max_logit);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

template <typename T>
BasicCrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits,
                                           std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(logits.n())) {
    throw InvalidArgument("softmax_cross_entropy: " + std::to_string(labels.size()) +
                          " labels for batch of " + std::to_string(logits.n()));
  }
  const int classes = logits.c() * logits.h() * logits.w();
  BasicCrossEntropy<T> result{0.0, BasicTensor<T>(logits.shape())};
  const double inv_batch = 1.0 / logits.n();
  for (int n = 0; n < logits.n(); ++n) {
    const int label = labels[n];
    if (label < 0 || label >= classes) {
      throw InvalidArgument("softmax_cross_entropy: label " + std::to_string(label) +
                            " out of range");
    }
    std::span<const T> row =
        logits.data().subspan(static_cast<std::size_t>(n) * classes, classes);
    const std::vector<double> p = softmax<T>(row);
    result.loss -= std::log(std::max(p[label], 1e-300)) * inv_batch;
    T* g = result.grad.data().data() + static_cast<std::size_t>(n) * classes;
    for (int k = 0; k < classes; ++k) {
      g[k] = static_cast<T>((p[k] - (k == label ? 1.0 : 0.0)) * inv_batch);
    }
  }
  return result;
}

template <typename T>
BasicTensor<T> batchnorm_train(const BasicTensor<T>& input, const BasicBatchNorm<T>& bn,
                               BasicBatchStats<T>& stats) {
  const int channels = input.c();
  check_batchnorm(bn, channels, /*need_stats=*/false);
  const double count = static_cast<double>(input.n()) * input.shape().plane();
  stats.mean.assign(channels, T(0));
  stats.var.assign(channels, T(0));
  stats.normalized = BasicTensor<T>(input.shape());
  BasicTensor<T> out(input.shape());
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (int n = 0; n < input.n(); ++n) {
      for (T v : input.plane(n, c)) sum += v;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int n = 0; n < input.n(); ++n) {
      for (T v : input.plane(n, c)) sq += (v - mean) * (v - mean);
    }
    const double var = sq / count;
    stats.mean[c] = static_cast<T>(mean);
    stats.var[c] = static_cast<T>(var);
    const double inv = 1.0 / std::sqrt(var + bn.eps);
    for (int n = 0; n < input.n(); ++n) {
      std::span<const T> x = input.plane(n, c);
      std::span<T> xh = stats.normalized.plane(n, c);
      std::span<T> y = out.plane(n, c);
      for (std::size_t i = 0; i < x.size(); ++i) {
        xh[i] = static_cast<T>((x[i] - mean) * inv);
        y[i] = bn.gamma[c] * xh[i] + bn.beta[c];
      }
    }
  }
  return out;
}

#define UXAI_INSTANTIATE_FORWARD(T)                                                   \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                 SpanOf<T>, const ConvSpec&);                         \
  template BasicTensor<T> batchnorm_infer(const BasicTensor<T>&,                      \
                                          const BasicBatchNorm<T>&);                  \
  template T activation(T, Activation);                                               \
  template BasicTensor<T> activation(const BasicTensor<T>&, Activation);              \
  template BasicTensor<T> sigmoid(const BasicTensor<T>&);                             \
  template BasicTensor<T> global_avg_pool(const BasicTensor<T>&);                     \
  template BasicTensor<T> linear(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                 SpanOf<T>);                                          \
  template BasicTensor<T> scale_channels(const BasicTensor<T>&, const BasicTensor<T>&); \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);          \
  template std::vector<double> softmax(std::span<const T>);                           \
  template BasicCrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>&,          \
                                                      std::span<const int>);          \
  template BasicTensor<T> batchnorm_train(const BasicTensor<T>&,                      \
                                          const BasicBatchNorm<T>&, BasicBatchStats<T>&);

UXAI_INSTANTIATE_FORWARD(float)
UXAI_INSTANTIATE_FORWARD(double)

#undef UXAI_INSTANTIATE_FORWARD

}  // namespace uxai::tensor
