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

#pragma once

#include <algorithm>
#include <span>

#include "uxai/tensor.hpp"

namespace uxai::tensor {

template <typename T>
void check_batchnorm(const BasicBatchNorm<T>& bn, int channels, bool need_stats);

namespace detail {

// Index bookkeeping shared by the convolution kernels. For a kernel tap
// (ky, kx) the valid output positions are those whose input coordinate
// o * stride - padding + k lands inside the image; the kernels iterate those
// ranges without per-pixel bounds checks.
struct ConvGeometry {
  int in_h, in_w, out_h, out_w, stride, padding;

  ConvGeometry(const Shape& in, const ConvSpec& spec)
      : in_h(in.h),
        in_w(in.w),
        out_h(spec.output_extent(in.h, spec.kernel_h)),
        out_w(spec.output_extent(in.w, spec.kernel_w)),
        stride(spec.stride),
        padding(spec.padding) {}

  // Valid [begin, end) output range along one axis for tap offset k.
  void valid_range(int k, int in, int out, int& begin, int& end) const {
    const int lo = padding - k;
    begin = lo > 0 ? (lo + stride - 1) / stride : 0;
    const int hi = in - 1 + padding - k;
    end = hi < 0 ? 0 : std::min(out, hi / stride + 1);
    begin = std::min(begin, end);
  }

  // fn(oy, iy, ox_begin, ox_end, ix_begin) for every valid output row.
  template <typename Fn>
  void for_each_row(int ky, int kx, Fn&& fn) const {
    int oy0, oy1, ox0, ox1;
    valid_range(ky, in_h, out_h, oy0, oy1);
    valid_range(kx, in_w, out_w, ox0, ox1);
    if (ox0 >= ox1) return;
    const int ix0 = ox0 * stride - padding + kx;
    for (int oy = oy0; oy < oy1; ++oy) {
      fn(oy, oy * stride - padding + ky, ox0, ox1, ix0);
    }
  }
};

inline bool is_pointwise(const ConvSpec& spec) {
  return spec.kernel_h == 1 && spec.kernel_w == 1 && spec.stride == 1 &&
         spec.padding == 0 && spec.groups == 1;
}

// Operands are validated by the callers; `out` and the gradients arrive
// allocated with their final shapes.
template <typename T>
void pointwise_conv(const BasicTensor<T>& input, const BasicTensor<T>& weights,
                    std::span<const T> bias, BasicTensor<T>& out);
void pointwise_conv_vjp(const Tensor& input, const Tensor& weights, const Tensor& upstream,
                        Tensor& grad_input, Tensor& grad_weights);

}  // namespace detail
}  // namespace uxai::tensor
