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

#include "uxai/colormap.hpp"

#include <algorithm>
#include <cmath>

#include "uxai/errors.hpp"

namespace uxai::imaging {

std::array<double, 3> turbo_colormap_exact(double t) {
  if (std::isnan(t)) throw InvalidArgument("turbo_colormap: t is NaN");
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 255.0;
  const int i0 = std::min(static_cast<int>(pos), 254);
  const double f = pos - i0;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double a = kTurboTable[i0][c];
    const double b = kTurboTable[i0 + 1][c];
    out[c] = a + (b - a) * f;
  }
  return out;
}

Rgb turbo_colormap(double t) {
  const auto v = turbo_colormap_exact(t);
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v[c]), 0L, 255L));
  }
  return out;
}

RgbaImage render_overlay(const RgbImage& base, const HeatMap& heat,
                         const OverlayParams& params) {
  if (!(params.global_alpha >= 0.0 && params.global_alpha <= 1.0)) {
    throw InvalidArgument("overlay alpha must be in [0, 1]");
  }
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma)) {
    throw InvalidArgument("overlay gamma must be positive");
  }
  const HeatMap h = resize_bilinear(heat, base.width, base.height);
  RgbaImage out{base.width, base.height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(base.width) *
                                          base.height * 4)};
  const std::size_t n = static_cast<std::size_t>(base.width) * base.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = h.values[i];
    const double alpha = params.global_alpha * std::pow(v, params.gamma);
    const auto color = turbo_colormap_exact(v);
    for (int c = 0; c < 3; ++c) {
      const double blended = alpha * color[c] + (1.0 - alpha) * base.pixels[i * 3 + c];
      out.pixels[i * 4 + c] =
          static_cast<std::uint8_t>(std::clamp(std::lround(blended), 0L, 255L));
    }
    out.pixels[i * 4 + 3] = 255;
  }
  return out;
}

RgbImage colorize(const HeatMap& heat) {
  heat.validate();
  RgbImage out(heat.width, heat.height);
  for (std::size_t i = 0; i < heat.values.size(); ++i) {
    const Rgb c = turbo_colormap(heat.values[i]);
    std::copy(c.begin(), c.end(), out.pixels.begin() + static_cast<long>(i * 3));
  }
  return out;
}

}  // namespace uxai::imaging
