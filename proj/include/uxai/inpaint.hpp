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
#include <vector>

#include "uxai/image.hpp"

namespace uxai::imaging {

// Fast-marching inpainting. `mask` is row-major with nonzero marking pixels
// to fill; it must cover the image and leave at least one pixel known.
//
// Pixels are filled in order of arrival time T from the hole boundary. Each
// is the normalized weighted sum over known pixels q within `radius` of
//   I(q) + grad I(q) . (p - q)
// with weight = direction * distance * level-set factors, clamped to
// [0, 255]. Pixels outside the mask are copied unchanged.
RgbImage telea_inpaint(const RgbImage& image, const std::vector<std::uint8_t>& mask,
                       double radius = 3.0);

}  // namespace uxai::imaging
