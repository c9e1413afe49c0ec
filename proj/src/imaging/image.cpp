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

#include "uxai/errors.hpp"
#include "uxai/image.hpp"

namespace uxai::imaging {
namespace {

void check_dims(int w, int h, const char* what) {
  if (w <= 0 || h <= 0) {
    throw InvalidArgument(std::string(what) + ": dimensions must be positive, got " +
                          std::to_string(w) + "x" + std::to_string(h));
  }
}

// Source taps for one output coordinate under half-pixel alignment.
struct Tap {
  int i0, i1;
  float frac;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> t(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int i0 = static_cast<int>(std::floor(src));
    const int i1 = std::min(i0 + 1, in - 1);
    t[o] = {i0, i1, static_cast<float>(src - i0)};
  }
  return t;
}

void resize_plane(const float* src, int sw, float* dst, int dw, int dh,
                  const std::vector<Tap>& tx, const std::vector<Tap>& ty) {
  for (int y = 0; y < dh; ++y) {
    const Tap& a = ty[y];
    const float* r0 = src + static_cast<std::size_t>(a.i0) * sw;
    const float* r1 = src + static_cast<std::size_t>(a.i1) * sw;
    float* out = dst + static_cast<std::size_t>(y) * dw;
    for (int x = 0; x < dw; ++x) {
      const Tap& b = tx[x];
      const float top = r0[b.i0] + (r0[b.i1] - r0[b.i0]) * b.frac;
      const float bottom = r1[b.i0] + (r1[b.i1] - r1[b.i0]) * b.frac;
      out[x] = top + (bottom - top) * a.frac;
    }
  }
}

}  // namespace

RgbImage::RgbImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  check_dims(w, h, "RgbImage");
  pixels.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

RgbImage::RgbImage(int w, int h, std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
  check_dims(w, h, "RgbImage");
  if (pixels.size() != static_cast<std::size_t>(w) * h * 3) {
    throw InvalidArgument("RgbImage: " + std::to_string(pixels.size()) + " bytes for " +
                          std::to_string(w) + "x" + std::to_string(h));
  }
}

HeatMap::HeatMap(int w, int h, float fill) : width(w), height(h) {
  check_dims(w, h, "HeatMap");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

void HeatMap::validate() const {
  check_dims(width, height, "HeatMap");
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("HeatMap: value count does not match dimensions");
  }
  for (float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw InvalidArgument("HeatMap: value " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

FloatImage to_float(const RgbImage& image) {
  check_dims(image.width, image.height, "to_float");
  FloatImage f{image.width, image.height, 3,
               std::vector<float>(static_cast<std::size_t>(image.width) * image.height * 3)};
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  for (int c = 0; c < 3; ++c) {
    float* dst = f.plane(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = image.pixels[i * 3 + c];
  }
  return f;
}

FloatImage resize_bilinear(const FloatImage& image, int width, int height) {
  check_dims(image.width, image.height, "resize_bilinear input");
  check_dims(width, height, "resize_bilinear output");
  if (width == image.width && height == image.height) return image;
  FloatImage out{width, height, image.channels,
                 std::vector<float>(static_cast<std::size_t>(width) * height * image.channels)};
  const auto tx = taps(image.width, width);
  const auto ty = taps(image.height, height);
  for (int c = 0; c < image.channels; ++c) {
    resize_plane(image.plane(c), image.width, out.plane(c), width, height, tx, ty);
  }
  return out;
}

RgbImage resize_bilinear(const RgbImage& image, int width, int height) {
  if (width == image.width && height == image.height) return image;
  const FloatImage f = resize_bilinear(to_float(image), width, height);
  RgbImage out(width, height);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (int c = 0; c < 3; ++c) {
    const float* src = f.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      out.pixels[i * 3 + c] =
          static_cast<std::uint8_t>(std::clamp(std::lround(src[i]), 0L, 255L));
    }
  }
  return out;
}

HeatMap resize_bilinear(const HeatMap& heat, int width, int height) {
  heat.validate();
  if (width == heat.width && height == heat.height) return heat;
  check_dims(width, height, "resize_bilinear output");
  HeatMap out(width, height);
  resize_plane(heat.values.data(), heat.width, out.values.data(), width, height,
               taps(heat.width, width), taps(heat.height, height));
  for (float& v : out.values) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

tensor::Tensor to_model_input(const RgbImage& image, int size,
                              const model::Normalization& norm) {
  const FloatImage f = resize_bilinear(to_float(image), size, size);
  tensor::Tensor t({1, 3, size, size});
  for (int c = 0; c < 3; ++c) {
    if (!(norm.stddev[c] > 0.0f)) {
      throw InvalidArgument("normalization std must be positive");
    }
    const float* src = f.plane(c);
    std::span<float> dst = t.plane(0, c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = (src[i] / 255.0f - norm.mean[c]) / norm.stddev[c];
    }
  }
  return t;
}

Preprocessed decode_and_preprocess(std::span<const std::uint8_t> bytes,
                                   const model::Normalization& norm, int size) {
  Preprocessed p;
  p.original = decode_image(bytes);
  check_dims(p.original.width, p.original.height, "decoded image");
  p.input = to_model_input(p.original, size, norm);
  return p;
}

}  // namespace uxai::imaging
