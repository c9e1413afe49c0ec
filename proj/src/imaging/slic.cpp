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
#include <limits>
#include <numeric>

#include "uxai/errors.hpp"
#include "uxai/superpixels.hpp"

namespace uxai::imaging {
namespace {

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3 * kDelta * kDelta) + 4.0 / 29.0;
}

struct Center {
  double l, a, b, x, y;
};

// 4-connected components of equal label. Returns the component id of every
// pixel and the size of every component.
struct Components {
  std::vector<int> id;
  std::vector<int> size;
  std::vector<int> label;
};

Components components(const std::vector<int>& labels, int w, int h) {
  Components c;
  c.id.assign(labels.size(), -1);
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (c.id[start] >= 0) continue;
    const int comp = static_cast<int>(c.size.size());
    const int lab = labels[start];
    int count = 0;
    c.id[start] = comp;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      ++count;
      const int x = p % w, y = p / w;
      const int nbrs[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& n : nbrs) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
        const int q = n[1] * w + n[0];
        if (c.id[q] < 0 && labels[q] == lab) {
          c.id[q] = comp;
          stack.push_back(q);
        }
      }
    }
    c.size.push_back(count);
    c.label.push_back(lab);
  }
  return c;
}

struct UnionFind {
  std::vector<int> parent, size;
  explicit UnionFind(const std::vector<int>& sizes) : parent(sizes.size()), size(sizes) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void merge_into(int from, int to) {
    from = find(from);
    to = find(to);
    if (from == to) return;
    parent[from] = to;
    size[to] += size[from];
  }
};

// Keeps the largest component of every label (first in scan order on ties)
// and merges each remaining orphan component, smallest first, into the
// adjacent group with the largest current size (lowest root index on ties).
// Only groups without a kept component are merged, and adjacency is taken
// over the whole group, so an orphan enclosed by its own group still finds a
// way out. Every final group therefore holds exactly one kept component.
std::vector<int> enforce_connectivity(const std::vector<int>& labels, int w, int h) {
  const Components comp = components(labels, w, h);
  const int n = static_cast<int>(comp.size.size());
  std::vector<int> primary_of_label;
  for (int i = 0; i < n; ++i) {
    const int lab = comp.label[i];
    if (lab >= static_cast<int>(primary_of_label.size())) primary_of_label.resize(lab + 1, -1);
    int& p = primary_of_label[lab];
    if (p < 0 || comp.size[i] > comp.size[p]) p = i;
  }
  std::vector<char> is_primary(static_cast<std::size_t>(n), 0);
  for (int p : primary_of_label) {
    if (p >= 0) is_primary[p] = 1;
  }

  std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(n));
  auto link = [&](int a, int b) {
    if (a == b) return;
    adjacent[a].push_back(b);
    adjacent[b].push_back(a);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = comp.id[y * w + x];
      if (x + 1 < w) link(a, comp.id[y * w + x + 1]);
      if (y + 1 < h) link(a, comp.id[(y + 1) * w + x]);
    }
  }

  std::vector<int> orphans;
  for (int i = 0; i < n; ++i) {
    if (!is_primary[i]) orphans.push_back(i);
  }
  std::stable_sort(orphans.begin(), orphans.end(),
                   [&](int a, int b) { return comp.size[a] < comp.size[b]; });
  UnionFind uf(comp.size);
  std::vector<char> anchored(is_primary);  // by root
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[i] = {i};

  // Orphans merged early can be revisited when their group is still loose.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int o : orphans) {
      const int own = uf.find(o);
      if (anchored[own]) continue;
      int best = -1;
      for (int m : members[own]) {
        for (int nb : adjacent[m]) {
          const int r = uf.find(nb);
          if (r == own) continue;
          if (best < 0 || uf.size[r] > uf.size[best] ||
              (uf.size[r] == uf.size[best] && r < best)) {
            best = r;
          }
        }
      }
      if (best < 0) continue;
      uf.merge_into(own, best);
      anchored[best] = anchored[best] || anchored[own];
      auto& dst = members[best];
      dst.insert(dst.end(), members[own].begin(), members[own].end());
      members[own].clear();
      changed = true;
    }
  }

  std::vector<int> group_label(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (is_primary[i]) group_label[uf.find(i)] = comp.label[i];
  }
  std::vector<int> out(labels.size());
  for (std::size_t p = 0; p < labels.size(); ++p) {
    out[p] = group_label[uf.find(comp.id[p])];
  }
  return out;
}

}  // namespace

std::array<double, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double rl = srgb_to_linear(r), gl = srgb_to_linear(g), bl = srgb_to_linear(b);
  const double x = (0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl) / 0.95047;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = (0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl) / 1.08883;
  const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

SuperpixelMap slic_superpixels(const RgbImage& image, int k, double compactness,
                               int iterations) {
  const int w = image.width, h = image.height;
  if (w <= 0 || h <= 0) throw InvalidArgument("slic: empty image");
  const long pixels = static_cast<long>(w) * h;
  if (k < 1 || k > pixels) {
    throw InvalidArgument("slic: k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(pixels) + "]");
  }
  if (iterations < 1) throw InvalidArgument("slic: iterations must be >= 1");
  if (!(compactness >= 0.0) || !std::isfinite(compactness)) {
    throw InvalidArgument("slic: compactness must be a finite non-negative number");
  }

  std::vector<std::array<double, 3>> lab(static_cast<std::size_t>(pixels));
  for (long p = 0; p < pixels; ++p) {
    const std::uint8_t* px = image.pixels.data() + p * 3;
    lab[p] = rgb_to_lab(px[0], px[1], px[2]);
  }

  // Grid of nx * ny seeds approximating k with roughly square cells.
  const int nx = std::clamp(
      static_cast<int>(std::lround(std::sqrt(static_cast<double>(k) * w / h))), 1, w);
  const int ny = std::clamp(static_cast<int>(std::lround(static_cast<double>(k) / nx)), 1, h);
  const double step = std::sqrt(static_cast<double>(pixels) / (nx * ny));
  const double window = std::max(static_cast<double>(w) / nx, static_cast<double>(h) / ny);

  auto gradient = [&](int x, int y) {
    const auto& l = lab[y * w + std::max(x - 1, 0)];
    const auto& r = lab[y * w + std::min(x + 1, w - 1)];
    const auto& u = lab[std::max(y - 1, 0) * w + x];
    const auto& d = lab[std::min(y + 1, h - 1) * w + x];
    double g = 0.0;
    for (int c = 0; c < 3; ++c) g += (r[c] - l[c]) * (r[c] - l[c]) + (d[c] - u[c]) * (d[c] - u[c]);
    return g;
  };

  std::vector<Center> centers;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int cx = std::min(w - 1, static_cast<int>((i + 0.5) * w / nx));
      int cy = std::min(h - 1, static_cast<int>((j + 0.5) * h / ny));
      int bx = cx, by = cy;
      double best = gradient(cx, cy);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = cx + dx, y = cy + dy;
          if (x < 0 || y < 0 || x >= w || y >= h) continue;
          const double g = gradient(x, y);
          if (g < best) {
            best = g;
            bx = x;
            by = y;
          }
        }
      }
      const auto& c = lab[by * w + bx];
      centers.push_back({c[0], c[1], c[2], static_cast<double>(bx), static_cast<double>(by)});
    }
  }

  const double spatial = compactness / step;
  std::vector<int> labels(static_cast<std::size_t>(pixels), -1);
  std::vector<double> dist(static_cast<std::size_t>(pixels));
  for (int it = 0; it < iterations; ++it) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
      const Center& c = centers[ci];
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x - window)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + window)));
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y - window)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + window)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const int p = y * w + x;
          const auto& v = lab[p];
          const double dl = v[0] - c.l, da = v[1] - c.a, db = v[2] - c.b;
          const double dx = x - c.x, dy = y - c.y;
          const double d = std::sqrt(dl * dl + da * da + db * db) +
                           spatial * std::sqrt(dx * dx + dy * dy);
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = ci;
          }
        }
      }
    }
    std::vector<Center> sums(centers.size(), Center{0, 0, 0, 0, 0});
    std::vector<long> counts(centers.size(), 0);
    for (long p = 0; p < pixels; ++p) {
      const int ci = labels[p];
      if (ci < 0) continue;
      Center& s = sums[ci];
      s.l += lab[p][0];
      s.a += lab[p][1];
      s.b += lab[p][2];
      s.x += static_cast<double>(p % w);
      s.y += static_cast<double>(p / w);
      ++counts[ci];
    }
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (counts[ci] == 0) continue;
      const double n = static_cast<double>(counts[ci]);
      centers[ci] = {sums[ci].l / n, sums[ci].a / n, sums[ci].b / n, sums[ci].x / n,
                     sums[ci].y / n};
    }
  }

  // Pixels outside every window fall to the spatially nearest center.
  for (long p = 0; p < pixels; ++p) {
    if (labels[p] >= 0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int ci = 0; ci < static_cast<int>(centers.size()); ++ci) {
      const double dx = static_cast<double>(p % w) - centers[ci].x;
      const double dy = static_cast<double>(p / w) - centers[ci].y;
      if (dx * dx + dy * dy < best) {
        best = dx * dx + dy * dy;
        labels[p] = ci;
      }
    }
  }

  labels = enforce_connectivity(labels, w, h);

  SuperpixelMap map{w, h, 0, std::vector<int>(static_cast<std::size_t>(pixels))};
  std::vector<int> dense(centers.size(), -1);
  for (long p = 0; p < pixels; ++p) {
    int& d = dense[labels[p]];
    if (d < 0) d = map.count++;
    map.labels[p] = d;
  }
  return map;
}

std::string SuperpixelMap::check() const {
  if (width <= 0 || height <= 0) return "empty map";
  if (labels.size() != static_cast<std::size_t>(width) * height) {
    return "label count does not match dimensions";
  }
  if (count < 1) return "no regions";
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] < 0 || labels[p] >= count) {
      return "pixel " + std::to_string(p) + " has label " + std::to_string(labels[p]) +
             " outside [0, " + std::to_string(count) + ")";
    }
  }
  const Components comp = components(labels, width, height);
  std::vector<int> per_label(static_cast<std::size_t>(count), 0);
  for (int lab : comp.label) ++per_label[lab];
  for (int i = 0; i < count; ++i) {
    if (per_label[i] == 0) return "label " + std::to_string(i) + " is empty";
    if (per_label[i] > 1) {
      return "label " + std::to_string(i) + " has " + std::to_string(per_label[i]) +
             " components";
    }
  }
  return {};
}

std::vector<int> SuperpixelMap::sizes() const {
  std::vector<int> s(static_cast<std::size_t>(count), 0);
  for (int lab : labels) ++s[lab];
  return s;
}

std::vector<std::array<double, 2>> SuperpixelMap::centroids() const {
  std::vector<std::array<double, 2>> c(static_cast<std::size_t>(count), {0.0, 0.0});
  const std::vector<int> s = sizes();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      auto& v = c[at(x, y)];
      v[0] += x;
      v[1] += y;
    }
  }
  for (int i = 0; i < count; ++i) {
    c[i][0] /= s[i];
    c[i][1] /= s[i];
  }
  return c;
}

}  // namespace uxai::imaging
