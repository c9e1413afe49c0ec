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

// Image containers, codecs, resizing and model-input preprocessing.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uxai/model.hpp"
#include "uxai/tensor.hpp"

namespace uxai::imaging {

// 8-bit RGB, row-major, interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0);
  RgbImage(int w, int h, std::vector<std::uint8_t> data);

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  std::uint8_t& at(int x, int y, int c) { return pixels[index(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return pixels[index(x, y) + c]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct RgbaImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  friend bool operator==(const RgbaImage&, const RgbaImage&) = default;
};

// Per-pixel saliency in [0, 1].
struct HeatMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  HeatMap() = default;
  HeatMap(int w, int h, float fill = 0.0f);

  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

  // Throws InvalidArgument unless sized correctly with finite values in [0, 1].
  void validate() const;
};

// Planar float image; resize works in this space so no rounding happens
// between decode and normalization.
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> values;  // channel-major planes

  float* plane(int c) { return values.data() + static_cast<std::size_t>(c) * width * height; }
  const float* plane(int c) const {
    return values.data() + static_cast<std::size_t>(c) * width * height;
  }
};

// ---------------------------------------------------------------------------
// Codecs.

enum class ImageFormat { kUnknown, kPng, kJpeg };

// Identifies the container from its leading magic bytes.
ImageFormat sniff_format(std::span<const std::uint8_t> bytes);
std::string to_string(ImageFormat format);

// PNG or JPEG (baseline and progressive). Grayscale and palette sources are
// expanded to RGB; alpha is dropped. Throws DecodeError.
RgbImage decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const RgbImage& image);
std::vector<std::uint8_t> encode_png(const RgbaImage& image);
// Baseline JPEG, for tests and fixtures.
std::vector<std::uint8_t> encode_jpeg(const RgbImage& image, int quality = 90,
                                      bool progressive = false);

// RFC 4648, standard alphabet with padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws InvalidArgument on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

struct PngBase64 {
  std::vector<std::uint8_t> png;
  std::string base64;
};
PngBase64 encode_png_base64(const RgbImage& image);
PngBase64 encode_png_base64(const RgbaImage& image);

// ---------------------------------------------------------------------------
// Resampling.

FloatImage to_float(const RgbImage& image);

// Bilinear with half-pixel centers (align-corners off) and edge clamping.
FloatImage resize_bilinear(const FloatImage& image, int width, int height);
RgbImage resize_bilinear(const RgbImage& image, int width, int height);
HeatMap resize_bilinear(const HeatMap& heat, int width, int height);

// (1, 3, size, size) tensor: bilinear resize, scale to [0, 1], then
// (x - mean) / std per channel.
tensor::Tensor to_model_input(const RgbImage& image, int size,
                              const model::Normalization& norm);

struct Preprocessed {
  RgbImage original;
  tensor::Tensor input;
};

// Throws DecodeError for undecodable bytes, InvalidArgument for an empty image.
Preprocessed decode_and_preprocess(std::span<const std::uint8_t> bytes,
                                   const model::Normalization& norm, int size = 224);

}  // namespace uxai::imaging
