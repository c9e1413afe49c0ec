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

// 1x1 convolutions as matrix products over a (channels, batch * pixels)
// layout. Gathering the batch into one row gives the inner loops useful
// lengths at the small spatial sizes of the late blocks. Per-element
// accumulation order matches the general kernels, so forward results are
// bitwise identical to them.

#include <cstring>

#include "tensor/conv_taps.hpp"

namespace uxai::tensor::detail {
namespace {

constexpr int kBlock = 4;

// (n, c, p) -> (c, n * p)
template <typename T>
std::vector<T> gather(const BasicTensor<T>& t) {
  const std::size_t p = t.shape().plane();
  const std::size_t m = p * static_cast<std::size_t>(t.n());
  std::vector<T> rows(static_cast<std::size_t>(t.c()) * m);
  for (int n = 0; n < t.n(); ++n) {
    for (int c = 0; c < t.c(); ++c) {
      std::memcpy(rows.data() + c * m + n * p, t.plane(n, c).data(), p * sizeof(T));
    }
  }
  return rows;
}

template <typename T>
void scatter(const std::vector<T>& rows, BasicTensor<T>& t) {
  const std::size_t p = t.shape().plane();
  const std::size_t m = p * static_cast<std::size_t>(t.n());
  for (int n = 0; n < t.n(); ++n) {
    for (int c = 0; c < t.c(); ++c) {
      std::memcpy(t.plane(n, c).data(), rows.data() + c * m + n * p, p * sizeof(T));
    }
  }
}

// y[r] (+)= sum_k a(r, k) * x[k] for rows r, where each x[k] and y[r] has
// length m. Rows are processed kBlock at a time so each x[k] is read once
// per block.
template <typename T, typename Coef>
void accumulate_rows(int rows, int inner, std::size_t m, const T* x, T* y, Coef&& a) {
  int r = 0;
  for (; r + kBlock <= rows; r += kBlock) {
    T* y0 = y + (r + 0) * m;
    T* y1 = y + (r + 1) * m;
    T* y2 = y + (r + 2) * m;
    T* y3 = y + (r + 3) * m;
    for (int k = 0; k < inner; ++k) {
      const T* xk = x + k * m;
      const T a0 = a(r + 0, k), a1 = a(r + 1, k), a2 = a(r + 2, k), a3 = a(r + 3, k);
      for (std::size_t i = 0; i < m; ++i) {
        const T v = xk[i];
        y0[i] += a0 * v;
        y1[i] += a1 * v;
        y2[i] += a2 * v;
        y3[i] += a3 * v;
      }
    }
  }
  for (; r < rows; ++r) {
    T* yr = y + r * m;
    for (int k = 0; k < inner; ++k) {
      const T* xk = x + k * m;
      const T ar = a(r, k);
      for (std::size_t i = 0; i < m; ++i) yr[i] += ar * xk[i];
    }
  }
}

double dot(const float* a, const float* b, std::size_t m) {
  float lanes[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    for (int l = 0; l < 8; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  double acc = 0.0;
  for (float l : lanes) acc += l;
  for (; i < m; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

}  // namespace

template <typename T>
void pointwise_conv(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                    std::span<const T> bias, BasicTensor<T>& out) {
  const int cin = input.c();
  const int cout = out.c();
  const std::size_t m = input.shape().plane() * static_cast<std::size_t>(input.n());
  const std::vector<T> x = gather(input);
  std::vector<T> y(static_cast<std::size_t>(cout) * m);
  for (int co = 0; co < cout; ++co) {
    std::fill(y.begin() + co * m, y.begin() + (co + 1) * m, bias.empty() ? T(0) : bias[co]);
  }
  const T* w = weights.data().data();
  accumulate_rows(cout, cin, m, x.data(), y.data(),
                  [&](int co, int ci) { return w[co * cin + ci]; });
  scatter(y, out);
}

void pointwise_conv_vjp(const Tensor& input, const Tensor& weights, const Tensor& upstream,
                        Tensor& grad_input, Tensor& grad_weights) {
  const int cin = input.c();
  const int cout = upstream.c();
  const std::size_t m = input.shape().plane() * static_cast<std::size_t>(input.n());
  const std::vector<float> x = gather(input);
  const std::vector<float> gy = gather(upstream);

  std::vector<float> gx(static_cast<std::size_t>(cin) * m, 0.0f);
  const float* w = weights.data().data();
  accumulate_rows(cin, cout, m, gy.data(), gx.data(),
                  [&](int ci, int co) { return w[co * cin + ci]; });
  scatter(gx, grad_input);

  float* gw = grad_weights.data().data();
  for (int co = 0; co < cout; ++co) {
    for (int ci = 0; ci < cin; ++ci) {
      gw[co * cin + ci] = static_cast<float>(dot(gy.data() + co * m, x.data() + ci * m, m));
    }
  }
}

template void pointwise_conv(const BasicTensor<float>&, const BasicTensor<float>&,
                             std::span<const float>, BasicTensor<float>&);
template void pointwise_conv(const BasicTensor<double>&, const BasicTensor<double>&,
                             std::span<const double>, BasicTensor<double>&);

}  // namespace uxai::tensor::detail
