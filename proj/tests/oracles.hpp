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

// Independent oracles for imaging and attribution, shared by the unit tests
// and the acceptance runner.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "uxai/image.hpp"
#include "uxai/superpixels.hpp"
#include "uxai/xai.hpp"

namespace uxai::testing {

inline imaging::RgbImage random_image(int w, int h, std::mt19937_64& rng) {
  imaging::RgbImage img(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

inline imaging::RgbImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  imaging::RgbImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

// Independent half-pixel bilinear sample of one channel, in double.
inline double bilinear_oracle(const imaging::RgbImage& img, int c, double sx, double sy) {
  auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
  const double fx = std::max(sx, 0.0), fy = std::max(sy, 0.0);
  const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
  const double ax = fx - x0, ay = fy - y0;
  auto px = [&](int x, int y) {
    return static_cast<double>(img.at(clampi(x, img.width), clampi(y, img.height), c));
  };
  return (1 - ay) * ((1 - ax) * px(x0, y0) + ax * px(x0 + 1, y0)) +
         ay * ((1 - ax) * px(x0, y0 + 1) + ax * px(x0 + 1, y0 + 1));
}

inline std::vector<std::uint8_t> rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * h, 0);
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) m[static_cast<std::size_t>(y) * w + x] = 1;
  }
  return m;
}

// gx by gy rectangular tiles; `perm` optionally renames tile i to perm[i].
inline imaging::SuperpixelMap grid_segments(int w, int h, int gx, int gy,
                                            const std::vector<int>& perm = {}) {
  imaging::SuperpixelMap m{w, h, gx * gy, std::vector<int>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int tile = (y * gy / h) * gx + x * gx / w;
      m.labels[static_cast<std::size_t>(y) * w + x] = perm.empty() ? tile : perm[tile];
    }
  }
  return m;
}

// A "model" that looks only at which regions still show their original
// pixels, and scores that coalition with an arbitrary set function. With a
// noise image, any masker changes every pixel of a masked region with
// overwhelming probability.
using SetFunction = std::function<double(const std::vector<bool>&)>;

inline xai::Scorer set_scorer(const imaging::RgbImage& original,
                              const imaging::SuperpixelMap& seg, SetFunction g,
                              int* calls = nullptr) {
  return [&original, &seg, g, calls](const std::vector<imaging::RgbImage>& batch) {
    std::vector<double> out;
    for (const imaging::RgbImage& img : batch) {
      std::vector<bool> on(static_cast<std::size_t>(seg.count), true);
      for (std::size_t p = 0; p < seg.labels.size(); ++p) {
        for (int c = 0; c < 3; ++c) {
          if (img.pixels[p * 3 + c] != original.pixels[p * 3 + c]) on[seg.labels[p]] = false;
        }
      }
      out.push_back(g(on));
      if (calls) ++*calls;
    }
    return out;
  };
}

inline std::vector<bool> bits(unsigned mask, int k) {
  std::vector<bool> b(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) b[i] = (mask >> i) & 1u;
  return b;
}

// Exact Shapley values by enumerating every coalition.
inline std::vector<double> shapley_oracle(const SetFunction& g, int k) {
  std::vector<double> phi(static_cast<std::size_t>(k), 0.0);
  std::vector<double> fact(k + 1, 1.0);
  for (int i = 1; i <= k; ++i) fact[i] = fact[i - 1] * i;
  for (unsigned s = 0; s < (1u << k); ++s) {
    const int size = __builtin_popcount(s);
    for (int i = 0; i < k; ++i) {
      if (s & (1u << i)) continue;
      const double w = fact[size] * fact[k - size - 1] / fact[k];
      phi[i] += w * (g(bits(s | (1u << i), k)) - g(bits(s, k)));
    }
  }
  return phi;
}

// Random set function given by a lookup table over all coalitions.
inline SetFunction table_function(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto table = std::make_shared<std::vector<double>>(1u << k);
  for (double& v : *table) v = u(rng);
  return [table](const std::vector<bool>& on) {
    unsigned idx = 0;
    for (std::size_t i = 0; i < on.size(); ++i) idx |= static_cast<unsigned>(on[i]) << i;
    return (*table)[idx];
  };
}

inline xai::ShapParams mean_fill_params(int max_evals = 500) {
  xai::ShapParams p;
  p.max_evals = max_evals;
  p.masker = xai::Masker::kMeanFill;
  return p;
}

}  // namespace uxai::testing
