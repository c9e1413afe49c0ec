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

// Ten primitives chosen to stay distinct under arbitrary rotation and the
// flips applied by augmentation: no class is a rotated copy of another.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uxai/augment.hpp"
#include "uxai/cli.hpp"
#include "uxai/errors.hpp"

namespace uxai::cli {
namespace {

// Inside test in shape-local coordinates, unit radius.
bool inside(int cls, double u, double v) {
  const double r = std::hypot(u, v);
  const double au = std::abs(u), av = std::abs(v);
  switch (cls) {
    case 0: return r <= 1.0;                                   // disc
    case 1: return r >= 0.6 && r <= 1.0;                       // ring
    case 2: return r <= 1.0 && std::hypot(u - 0.5, v) >= 0.75;  // crescent
    case 3: return std::max(au, av) <= 0.85 && std::max(au, av) >= 0.55;  // frame
    case 4: return (au <= 0.25 && av <= 1.0) || (av <= 0.25 && au <= 1.0);  // cross
    case 5: return v >= -0.5 && v <= 1.0 - std::sqrt(3.0) * au;  // triangle
    case 6: return au <= 1.0 && av <= 0.22;                    // bar
    case 7: return std::hypot(au - 0.55, v) <= 0.35;           // two dots
    case 8: return r <= 0.3 || (r >= 0.65 && r <= 1.0);        // bullseye
    case 9: return std::hypot(au - 0.5, av - 0.5) <= 0.3;      // four dots
    default: throw InvalidArgument("shape class out of range");
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

const std::vector<std::string>& shape_names() {
  static const std::vector<std::string> names = {"disc",     "ring", "crescent", "frame",
                                                 "cross",    "triangle", "bar", "two_dots",
                                                 "bullseye", "four_dots"};
  return names;
}

RgbImage render_shape(int class_index, const SyntheticSpec& spec, Rng& rng) {
  if (class_index < 0 || class_index >= static_cast<int>(shape_names().size())) {
    throw InvalidArgument("shape class out of range");
  }
  if (spec.image_size < 16) throw InvalidArgument("synthetic image_size must be >= 16");
  const int n = spec.image_size;
  const double radius = rng.uniform(0.24, 0.34) * n;
  const double cx = n / 2.0 + rng.uniform(-0.06, 0.06) * n;
  const double cy = n / 2.0 + rng.uniform(-0.06, 0.06) * n;
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double fg = rng.uniform(150.0, 230.0);
  const double bg = rng.uniform(30.0, 80.0);
  const double gx = rng.uniform(-20.0, 20.0), gy = rng.uniform(-20.0, 20.0);
  const double c = std::cos(theta), s = std::sin(theta);

  RgbImage img(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      // 2x2 supersampling for soft edges.
      int hits = 0;
      for (int sy = 0; sy < 2; ++sy) {
        for (int sx = 0; sx < 2; ++sx) {
          const double dx = x + 0.25 + 0.5 * sx - cx, dy = y + 0.25 + 0.5 * sy - cy;
          const double u = (c * dx + s * dy) / radius, v = (-s * dx + c * dy) / radius;
          hits += inside(class_index, u, v);
        }
      }
      const double cover = hits / 4.0;
      const double base = bg + gx * (x / double(n) - 0.5) + gy * (y / double(n) - 0.5);
      const double value = base + cover * (fg - base) + spec.noise_stddev * rng.normal();
      std::fill_n(img.pixels.begin() + (static_cast<long>(y) * n + x) * 3, 3, to_byte(value));
    }
  }
  if (!spec.augment) return img;
  imaging::AugmentationConfig aug;  // flips, 15-60 degree rotations, affine jitter
  return imaging::augment(img, aug, rng);
}

Dataset make_synthetic(int per_class, const SyntheticSpec& spec, Rng& rng) {
  if (per_class < 0) throw InvalidArgument("per_class must be non-negative");
  const int classes = static_cast<int>(shape_names().size());
  Dataset d;
  d.images.reserve(static_cast<std::size_t>(per_class) * classes);
  for (int i = 0; i < per_class * classes; ++i) {
    d.images.push_back(render_shape(i % classes, spec, rng));
    d.labels.push_back(i % classes);
  }
  return d;
}

}  // namespace uxai::cli
