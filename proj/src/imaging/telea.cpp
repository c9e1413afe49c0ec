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
#include <queue>
#include <tuple>

#include "uxai/errors.hpp"
#include "uxai/inpaint.hpp"

namespace uxai::imaging {
namespace {

enum Flag : std::uint8_t { kKnown = 0, kBand = 1, kInside = 2 };
constexpr double kFar = 1e6;

class Marcher {
 public:
  Marcher(const RgbImage& image, const std::vector<std::uint8_t>& mask, double radius)
      : w_(image.width), h_(image.height), radius_(radius) {
    const std::size_t n = static_cast<std::size_t>(w_) * h_;
    flag_.assign(n, kKnown);
    t_.assign(n, 0.0);
    value_.resize(n * 3);
    for (std::size_t i = 0; i < n * 3; ++i) value_[i] = image.pixels[i];
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) {
        flag_[i] = kInside;
        t_[i] = kFar;
      }
    }
  }

  void run() {
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (flag_[idx(x, y)] != kKnown) continue;
        if (inside(x - 1, y) || inside(x + 1, y) || inside(x, y - 1) || inside(x, y + 1)) {
          flag_[idx(x, y)] = kBand;
          push(x, y);
        }
      }
    }
    while (!heap_.empty()) {
      const std::size_t p = std::get<2>(heap_.top());
      heap_.pop();
      if (flag_[p] == kKnown) continue;
      flag_[p] = kKnown;
      const int px = static_cast<int>(p % w_), py = static_cast<int>(p / w_);
      const int nbrs[4][2] = {{px - 1, py}, {px, py - 1}, {px + 1, py}, {px, py + 1}};
      for (const auto& nb : nbrs) {
        const int x = nb[0], y = nb[1];
        if (!inside(x, y)) continue;
        const std::size_t q = idx(x, y);
        t_[q] = std::min({solve(x - 1, y, x, y - 1), solve(x + 1, y, x, y - 1),
                          solve(x - 1, y, x, y + 1), solve(x + 1, y, x, y + 1)});
        fill(x, y);
        flag_[q] = kBand;
        push(x, y);
      }
    }
  }

  RgbImage result(const RgbImage& image, const std::vector<std::uint8_t>& mask) const {
    RgbImage out = image;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      for (int c = 0; c < 3; ++c) {
        out.pixels[i * 3 + c] = static_cast<std::uint8_t>(
            std::clamp(std::lround(value_[i * 3 + c]), 0L, 255L));
      }
    }
    return out;
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * w_ + x; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_; }
  bool inside(int x, int y) const { return in_bounds(x, y) && flag_[idx(x, y)] == kInside; }
  bool known(int x, int y) const { return in_bounds(x, y) && flag_[idx(x, y)] != kInside; }
  double arrival(int x, int y) const { return in_bounds(x, y) ? t_[idx(x, y)] : kFar; }

  void push(int x, int y) { heap_.emplace(t_[idx(x, y)], seq_++, idx(x, y)); }

  // Upwind eikonal update from one horizontal and one vertical neighbor.
  double solve(int x1, int y1, int x2, int y2) const {
    const bool k1 = known(x1, y1), k2 = known(x2, y2);
    const double a = arrival(x1, y1), b = arrival(x2, y2);
    if (k1 && k2) {
      const double diff = a - b;
      if (std::abs(diff) >= 1.0) return 1.0 + std::min(a, b);
      return (a + b + std::sqrt(2.0 - diff * diff)) * 0.5;
    }
    if (k1) return 1.0 + a;
    if (k2) return 1.0 + b;
    return 1.0 + std::min(a, b);
  }

  // One-sided or central difference along an axis using known samples only.
  template <typename Sample>
  double derivative(int x, int y, int dx, int dy, Sample&& sample) const {
    const bool fwd = known(x + dx, y + dy), back = known(x - dx, y - dy);
    if (fwd && back) return (sample(x + dx, y + dy) - sample(x - dx, y - dy)) * 0.5;
    if (fwd) return sample(x + dx, y + dy) - sample(x, y);
    if (back) return sample(x, y) - sample(x - dx, y - dy);
    return 0.0;
  }

  void fill(int x, int y) {
    auto t_at = [&](int sx, int sy) { return t_[idx(sx, sy)]; };
    const double gtx = derivative(x, y, 1, 0, t_at);
    const double gty = derivative(x, y, 0, 1, t_at);
    const double gt_norm = std::hypot(gtx, gty);
    const double tp = t_[idx(x, y)];

    const int range = static_cast<int>(std::ceil(radius_));
    double sum[3] = {0, 0, 0};
    double weight = 0.0;
    for (int qy = y - range; qy <= y + range; ++qy) {
      for (int qx = x - range; qx <= x + range; ++qx) {
        if (!known(qx, qy)) continue;
        const double rx = x - qx, ry = y - qy;
        const double r2 = rx * rx + ry * ry;
        if (r2 == 0.0 || r2 > radius_ * radius_) continue;
        const double rn = std::sqrt(r2);
        double dir = gt_norm > 0 ? std::abs(rx * gtx + ry * gty) / (rn * gt_norm) : 0.0;
        if (dir <= 0.01) dir = 1e-6;
        const double dst = 1.0 / r2;
        const double lev = 1.0 / (1.0 + std::abs(t_[idx(qx, qy)] - tp));
        const double wgt = dir * dst * lev;
        for (int c = 0; c < 3; ++c) {
          auto v_at = [&](int sx, int sy) { return value_[idx(sx, sy) * 3 + c]; };
          const double gx = derivative(qx, qy, 1, 0, v_at);
          const double gy = derivative(qx, qy, 0, 1, v_at);
          sum[c] += wgt * (v_at(qx, qy) + gx * rx + gy * ry);
        }
        weight += wgt;
      }
    }
    if (weight > 0.0) {
      for (int c = 0; c < 3; ++c) {
        value_[idx(x, y) * 3 + c] = std::clamp(sum[c] / weight, 0.0, 255.0);
      }
      return;
    }
    // Radius below one pixel: average the known 4-neighbors.
    int count = 0;
    double avg[3] = {0, 0, 0};
    const int nbrs[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
    for (const auto& nb : nbrs) {
      if (!known(nb[0], nb[1])) continue;
      ++count;
      for (int c = 0; c < 3; ++c) avg[c] += value_[idx(nb[0], nb[1]) * 3 + c];
    }
    for (int c = 0; c < 3; ++c) value_[idx(x, y) * 3 + c] = count ? avg[c] / count : 0.0;
  }

  using Entry = std::tuple<double, std::uint64_t, std::size_t>;

  int w_, h_;
  double radius_;
  std::vector<std::uint8_t> flag_;
  std::vector<double> t_;
  std::vector<double> value_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
  std::uint64_t seq_ = 0;
};

}  // namespace

RgbImage telea_inpaint(const RgbImage& image, const std::vector<std::uint8_t>& mask,
                       double radius) {
  if (image.width <= 0 || image.height <= 0) throw InvalidArgument("inpaint: empty image");
  if (mask.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw InvalidArgument("inpaint: mask has " + std::to_string(mask.size()) +
                          " entries for a " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) + " image");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("inpaint: radius must be positive");
  }
  const bool any = std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m; });
  if (!any) return image;
  if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m; })) {
    throw InvalidArgument("inpaint: mask covers the whole image, nothing to propagate");
  }
  Marcher m(image, mask, radius);
  m.run();
  return m.result(image, mask);
}

}  // namespace uxai::imaging
