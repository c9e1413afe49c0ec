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

#include "uxai/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uxai/errors.hpp"

namespace uxai::imaging {
namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

void require(bool ok, const char* field, const char* why) {
  if (!ok) throw InvalidArgument(std::string("augmentation ") + field + " " + why);
}

}  // namespace

void AugmentationConfig::validate() const {
  require(flip_h_prob >= 0.0 && flip_h_prob <= 1.0, "flip_h_prob", "must be in [0, 1]");
  require(flip_v_prob >= 0.0 && flip_v_prob <= 1.0, "flip_v_prob", "must be in [0, 1]");
  require(rotation_min_deg >= 0.0 && rotation_min_deg <= rotation_max_deg &&
              rotation_max_deg <= 180.0,
          "rotation range", "must satisfy 0 <= min <= max <= 180");
  require(max_translation >= 0.0 && max_translation < 1.0, "max_translation",
          "must be in [0, 1)");
  require(scale_min > 0.0 && scale_min <= scale_max, "scale range",
          "must satisfy 0 < min <= max");
  require(max_shear_deg >= 0.0 && max_shear_deg < 90.0, "max_shear_deg",
          "must be in [0, 90)");
}

AugmentationDraw draw_augmentation(const AugmentationConfig& cfg, int width, int height,
                                   Rng& rng) {
  cfg.validate();
  // Every draw is taken unconditionally so the stream position does not
  // depend on earlier outcomes.
  AugmentationDraw d;
  d.flip_h = rng.bernoulli(cfg.flip_h_prob);
  d.flip_v = rng.bernoulli(cfg.flip_v_prob);
  const double magnitude = rng.uniform(cfg.rotation_min_deg, cfg.rotation_max_deg);
  const bool negative = rng.bernoulli(0.5);
  d.rotation_deg = negative ? -magnitude : magnitude;
  d.translate_x = rng.uniform(-cfg.max_translation, cfg.max_translation) * width;
  d.translate_y = rng.uniform(-cfg.max_translation, cfg.max_translation) * height;
  d.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
  d.shear_deg = rng.uniform(-cfg.max_shear_deg, cfg.max_shear_deg);
  if (magnitude == 0.0) d.rotation_deg = 0.0;
  return d;
}

RgbImage flip_horizontal(const RgbImage& image) {
  RgbImage out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(image.width - 1 - x, y, c);
    }
  }
  return out;
}

RgbImage flip_vertical(const RgbImage& image) {
  RgbImage out = image;
  for (int y = 0; y < image.height; ++y) {
    std::copy_n(image.pixels.begin() + image.index(0, image.height - 1 - y),
                static_cast<std::size_t>(image.width) * 3,
                out.pixels.begin() + out.index(0, y));
  }
  return out;
}

RgbImage apply_augmentation(const RgbImage& image, const AugmentationDraw& draw) {
  RgbImage src = image;
  if (draw.flip_h) src = flip_horizontal(src);
  if (draw.flip_v) src = flip_vertical(src);
  if (draw.is_identity_warp()) return src;

  // Forward map: p' = A (p - c) + c + t with A = R(theta) * Shear * scale.
  const double th = radians(draw.rotation_deg);
  const double sh = std::tan(radians(draw.shear_deg));
  const double cs = std::cos(th), sn = std::sin(th);
  const double s = draw.scale;
  const double a00 = cs * s, a01 = (cs * sh - sn) * s;
  const double a10 = sn * s, a11 = (sn * sh + cs) * s;
  const double det = a00 * a11 - a01 * a10;
  const double i00 = a11 / det, i01 = -a01 / det;
  const double i10 = -a10 / det, i11 = a00 / det;
  const double cx = (src.width - 1) / 2.0;
  const double cy = (src.height - 1) / 2.0;

  RgbImage out(src.width, src.height, 0);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const double dx = x - cx - draw.translate_x;
      const double dy = y - cy - draw.translate_y;
      const double sx = i00 * dx + i01 * dy + cx;
      const double sy = i10 * dx + i11 * dy + cy;
      if (sx < -0.5 || sy < -0.5 || sx > src.width - 0.5 || sy > src.height - 0.5) continue;
      const double fx = std::clamp(sx, 0.0, src.width - 1.0);
      const double fy = std::clamp(sy, 0.0, src.height - 1.0);
      const int x0 = static_cast<int>(fx);
      const int y0 = static_cast<int>(fy);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const int y1 = std::min(y0 + 1, src.height - 1);
      const double ax = fx - x0, ay = fy - y0;
      for (int c = 0; c < 3; ++c) {
        const double top = src.at(x0, y0, c) * (1 - ax) + src.at(x1, y0, c) * ax;
        const double bottom = src.at(x0, y1, c) * (1 - ax) + src.at(x1, y1, c) * ax;
        out.at(x, y, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(top * (1 - ay) + bottom * ay), 0L, 255L));
      }
    }
  }
  return out;
}

RgbImage augment(const RgbImage& image, const AugmentationConfig& cfg, Rng& rng) {
  return apply_augmentation(image, draw_augmentation(cfg, image.width, image.height, rng));
}

RgbImage augment(const RgbImage& image, const AugmentationConfig& cfg) {
  Rng rng(cfg.seed);
  return augment(image, cfg, rng);
}

}  // namespace uxai::imaging
