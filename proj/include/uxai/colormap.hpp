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

#include <array>
#include <cstdint>

#include "uxai/image.hpp"

namespace uxai::imaging {

extern const std::array<std::array<std::uint8_t, 3>, 256> kTurboTable;

using Rgb = std::array<std::uint8_t, 3>;

// t is clamped to [0, 1]; position t * 255 interpolates linearly between the
// two bracketing table entries, rounded to nearest. NaN throws.
Rgb turbo_colormap(double t);

// Unrounded variant used by the blend.
std::array<double, 3> turbo_colormap_exact(double t);

struct OverlayParams {
  double global_alpha = 0.5;
  double gamma = 1.0;
};

// alpha(p) = global_alpha * heat(p)^gamma; rgb = alpha * turbo(heat) +
// (1 - alpha) * base; output alpha channel is opaque. The heat map is
// resized bilinearly to the base size first when they differ.
RgbaImage render_overlay(const RgbImage& base, const HeatMap& heat,
                         const OverlayParams& params);

// Heat map rendered through the colormap alone, at its own size.
RgbImage colorize(const HeatMap& heat);

}  // namespace uxai::imaging
