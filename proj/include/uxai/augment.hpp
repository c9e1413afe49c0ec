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

#include <cstdint>

#include "uxai/image.hpp"
#include "uxai/random.hpp"

namespace uxai::imaging {

struct AugmentationConfig {
  double flip_h_prob = 0.5;
  double flip_v_prob = 0.5;
  // Rotation magnitude in degrees; the sign is drawn separately.
  double rotation_min_deg = 15.0;
  double rotation_max_deg = 60.0;
  double max_translation = 0.1;  // fraction of width / height
  double scale_min = 0.9;
  double scale_max = 1.1;
  double max_shear_deg = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// The parameters drawn for one image.
struct AugmentationDraw {
  bool flip_h = false;
  bool flip_v = false;
  double rotation_deg = 0.0;
  double translate_x = 0.0;  // pixels
  double translate_y = 0.0;
  double scale = 1.0;
  double shear_deg = 0.0;

  bool is_identity_warp() const {
    return rotation_deg == 0.0 && translate_x == 0.0 && translate_y == 0.0 &&
           scale == 1.0 && shear_deg == 0.0;
  }
};

AugmentationDraw draw_augmentation(const AugmentationConfig& cfg, int width, int height,
                                   Rng& rng);

// Flips, then rotation/scale/shear about the image center plus translation,
// sampled bilinearly by inverse mapping with black outside the source.
RgbImage apply_augmentation(const RgbImage& image, const AugmentationDraw& draw);

// Seeds a generator from cfg.seed.
RgbImage augment(const RgbImage& image, const AugmentationConfig& cfg);
// Continues an existing stream, for per-sample augmentation in training.
RgbImage augment(const RgbImage& image, const AugmentationConfig& cfg, Rng& rng);

RgbImage flip_horizontal(const RgbImage& image);
RgbImage flip_vertical(const RgbImage& image);

}  // namespace uxai::imaging
