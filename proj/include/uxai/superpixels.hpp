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

// SLIC superpixels: localized k-means in CIELAB + xy, followed by a
// connectivity pass so every region is a single 4-connected component.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "uxai/image.hpp"

namespace uxai::imaging {

struct SuperpixelMap {
  int width = 0;
  int height = 0;
  int count = 0;            // K
  std::vector<int> labels;  // row-major, each in [0, K)

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

  // Empty when the partition laws hold (full coverage, dense non-empty
  // labels, 4-connected regions); otherwise a description of the first
  // violation.
  std::string check() const;

  std::vector<int> sizes() const;
  // Pixel-space centroid (x, y) of each region.
  std::vector<std::array<double, 2>> centroids() const;
};

struct SlicParams {
  int k = 50;
  double compactness = 10.0;
  int iterations = 10;
};

SuperpixelMap slic_superpixels(const RgbImage& image, int k, double compactness,
                               int iterations);
inline SuperpixelMap slic_superpixels(const RgbImage& image, const SlicParams& p = {}) {
  return slic_superpixels(image, p.k, p.compactness, p.iterations);
}

// sRGB (D65) to CIELAB.
std::array<double, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace uxai::imaging
