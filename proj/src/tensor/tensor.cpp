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
#include <sstream>

#include "uxai/errors.hpp"
#include "uxai/tensor.hpp"

namespace uxai::tensor {

void check_extents(const Shape& s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw InvalidArgument("tensor extents must be >= 1, got " + s.to_string());
  }
}

std::string Shape::to_string() const {
  std::ostringstream out;
  out << "(" << n << ", " << c << ", " << h << ", " << w << ")";
  return out.str();
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(shape), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != shape_.numel()) {
    throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_.to_string());
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::row(int n) const {
  if (n < 0 || n >= shape_.n) {
    throw InvalidArgument("batch row " + std::to_string(n) + " out of range");
  }
  const std::size_t stride = static_cast<std::size_t>(shape_.c) * shape_.plane();
  std::vector<T> out(data_.begin() + n * stride, data_.begin() + (n + 1) * stride);
  return BasicTensor({1, shape_.c, shape_.h, shape_.w}, std::move(out));
}

template class BasicTensor<float>;
template class BasicTensor<double>;

Tensor stack(std::span<const Tensor> rows) {
  if (rows.empty()) throw InvalidArgument("stack: no rows");
  Shape s = rows.front().shape();
  if (s.n != 1) throw InvalidArgument("stack: rows must have batch 1");
  std::vector<float> data;
  data.reserve(s.numel() * rows.size());
  for (const Tensor& r : rows) {
    if (r.shape() != s) {
      throw InvalidArgument("stack: row shape " + r.shape().to_string() +
                            " differs from " + s.to_string());
    }
    data.insert(data.end(), r.data().begin(), r.data().end());
  }
  s.n = static_cast<int>(rows.size());
  return Tensor(s, std::move(data));
}

void ConvSpec::validate() const {
  if (in_channels < 1) throw InvalidArgument("conv: in_channels must be >= 1");
  if (out_channels < 1) throw InvalidArgument("conv: out_channels must be >= 1");
  if (kernel_h < 1 || kernel_w < 1) throw InvalidArgument("conv: kernel must be >= 1");
  if (stride < 1) throw InvalidArgument("conv: stride must be >= 1");
  if (padding < 0) throw InvalidArgument("conv: padding must be >= 0");
  if (groups < 1 || in_channels % groups != 0 || out_channels % groups != 0) {
    throw InvalidArgument("conv: groups " + std::to_string(groups) +
                          " must divide in_channels and out_channels");
  }
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "relu6") return Activation::kRelu6;
  if (name == "hswish") return Activation::kHswish;
  throw InvalidArgument("unknown activation '" + name + "'");
}

std::string to_string(Activation kind) {
  switch (kind) {
    case Activation::kRelu:
      return "relu";
    case Activation::kRelu6:
      return "relu6";
    case Activation::kHswish:
      return "hswish";
  }
  return "relu";
}

}  // namespace uxai::tensor
