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

#include "uxai/xai.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "uxai/errors.hpp"
#include "uxai/inpaint.hpp"
#include "uxai/random.hpp"

namespace uxai::xai {
namespace {

using Coalition = std::vector<bool>;  // true = superpixel shown

void check_segments(const RgbImage& image, const SuperpixelMap& segments) {
  if (segments.width != image.width || segments.height != image.height) {
    throw InvalidArgument("superpixel map is " + std::to_string(segments.width) + "x" +
                          std::to_string(segments.height) + ", image is " +
                          std::to_string(image.width) + "x" + std::to_string(image.height));
  }
  if (const std::string why = segments.check(); !why.empty()) {
    throw InvalidArgument("invalid superpixel map: " + why);
  }
}

// Superpixel ids ordered by their first pixel in scan order. Anything
// order-dependent goes through this so label ids never matter.
std::vector<int> canonical_order(const SuperpixelMap& segments) {
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(segments.count), 0);
  for (int label : segments.labels) {
    if (!seen[label]) {
      seen[label] = 1;
      order.push_back(label);
    }
  }
  return order;
}

std::vector<std::array<std::uint8_t, 3>> mean_colors(const RgbImage& image,
                                                     const SuperpixelMap& segments) {
  std::vector<std::array<double, 3>> sum(static_cast<std::size_t>(segments.count), {0, 0, 0});
  const std::vector<int> sizes = segments.sizes();
  for (std::size_t p = 0; p < segments.labels.size(); ++p) {
    for (int c = 0; c < 3; ++c) sum[segments.labels[p]][c] += image.pixels[p * 3 + c];
  }
  std::vector<std::array<std::uint8_t, 3>> out(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      out[k][c] = static_cast<std::uint8_t>(std::lround(sum[k][c] / sizes[k]));
    }
  }
  return out;
}

RgbImage mean_fill(const RgbImage& image, const SuperpixelMap& segments,
                   const std::vector<std::array<std::uint8_t, 3>>& means, const Coalition& on) {
  RgbImage out = image;
  for (std::size_t p = 0; p < segments.labels.size(); ++p) {
    const int k = segments.labels[p];
    if (on[k]) continue;
    for (int c = 0; c < 3; ++c) out.pixels[p * 3 + c] = means[k][c];
  }
  return out;
}

// Fully masked images have no boundary to propagate from; they are
// rendered as the global mean color instead.
RgbImage telea_fill(const RgbImage& image, const SuperpixelMap& segments,
                    const Coalition& on) {
  std::vector<std::uint8_t> mask(segments.labels.size());
  bool any_on = false, any_off = false;
  for (std::size_t p = 0; p < mask.size(); ++p) {
    mask[p] = on[segments.labels[p]] ? 0 : 1;
    (mask[p] ? any_off : any_on) = true;
  }
  if (!any_off) return image;
  if (!any_on) {
    double sum[3] = {0, 0, 0};
    for (std::size_t p = 0; p < mask.size(); ++p) {
      for (int c = 0; c < 3; ++c) sum[c] += image.pixels[p * 3 + c];
    }
    std::uint8_t fill[3];
    for (int c = 0; c < 3; ++c) {
      fill[c] = static_cast<std::uint8_t>(std::lround(sum[c] / static_cast<double>(mask.size())));
    }
    RgbImage out(image.width, image.height);
    for (std::size_t p = 0; p < mask.size(); ++p) {
      for (int c = 0; c < 3; ++c) out.pixels[p * 3 + c] = fill[c];
    }
    return out;
  }
  return imaging::telea_inpaint(image, mask, 3.0);
}

std::vector<double> checked_scores(const Scorer& score, const std::vector<RgbImage>& batch) {
  std::vector<double> out = score(batch);
  if (out.size() != batch.size()) {
    throw InvalidState("scorer returned " + std::to_string(out.size()) + " scores for " +
                       std::to_string(batch.size()) + " images");
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw NumericError("scorer returned a non-finite value");
  }
  return out;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
  const double tiny = std::max(scale, 1e-300) * 1e-12;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= tiny) {
      throw NumericError(
          "LIME normal equations are singular; use ridge_lambda > 0 or more samples");
    }
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const { return std::hash<Coalition>{}(c); }
};

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "gradcam") return Method::kGradCam;
  if (name == "lime") return Method::kLime;
  if (name == "shap") return Method::kShap;
  throw InvalidArgument("unknown method '" + name + "' (expected gradcam, lime or shap)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kGradCam: return "gradcam";
    case Method::kLime: return "lime";
    case Method::kShap: return "shap";
  }
  return "unknown";
}

Masker masker_from_string(const std::string& name) {
  if (name == "telea_inpaint") return Masker::kTeleaInpaint;
  if (name == "mean_fill") return Masker::kMeanFill;
  throw InvalidArgument("unknown masker '" + name + "' (expected telea_inpaint or mean_fill)");
}

std::string to_string(Masker masker) {
  return masker == Masker::kTeleaInpaint ? "telea_inpaint" : "mean_fill";
}

void ExplainParams::validate() const {
  if (target_class && *target_class < 0) throw InvalidArgument("target_class must be >= 0");
  if (lime.superpixel_k < 1) throw InvalidArgument("lime.superpixel_k must be >= 1");
  if (lime.num_samples < lime.superpixel_k + 2) {
    throw InvalidArgument("lime.num_samples must be >= superpixel_k + 2");
  }
  if (!(lime.kernel_width > 0.0) || !std::isfinite(lime.kernel_width)) {
    throw InvalidArgument("lime.kernel_width must be positive");
  }
  if (!(lime.ridge_lambda >= 0.0) || !std::isfinite(lime.ridge_lambda)) {
    throw InvalidArgument("lime.ridge_lambda must be >= 0");
  }
  if (shap.max_evals < 2) throw InvalidArgument("shap.max_evals must be >= 2");
  if (shap.superpixel_k < 1) throw InvalidArgument("shap.superpixel_k must be >= 1");
}

void Attribution::validate() const {
  if (granularity == Granularity::kSuperpixel) {
    if (values.size() != static_cast<std::size_t>(segments.count)) {
      throw InvalidArgument("attribution has " + std::to_string(values.size()) +
                            " values for " + std::to_string(segments.count) + " superpixels");
    }
    if (const std::string why = segments.check(); !why.empty()) {
      throw InvalidArgument("invalid superpixel map: " + why);
    }
  } else if (width <= 0 || height <= 0 ||
             values.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("pixel attribution does not match its dimensions");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("attribution has a non-finite value");
  }
}

HeatMap grad_cam(const model::Model& model, const tensor::Tensor& input, int target_class) {
  const model::TargetActivations ta = model.grad_wrt_target_activations(input, target_class);
  const tensor::Tensor& a = ta.activations;
  const tensor::Tensor& g = ta.gradients;
  const int k = a.c(), h = a.h(), w = a.w();
  const std::size_t plane = a.shape().plane();

  std::vector<double> raw(plane, 0.0);
  for (int ch = 0; ch < k; ++ch) {
    const auto gp = g.plane(0, ch);
    double alpha = 0.0;
    for (float v : gp) alpha += v;
    alpha /= static_cast<double>(plane);
    if (alpha == 0.0) continue;
    const auto ap = a.plane(0, ch);
    for (std::size_t i = 0; i < plane; ++i) raw[i] += alpha * ap[i];
  }
  double peak = 0.0;
  for (double& v : raw) {
    if (!std::isfinite(v)) throw NumericError("grad_cam: non-finite activation map");
    v = std::max(v, 0.0);
    peak = std::max(peak, v);
  }
  HeatMap out(input.w(), input.h());
  if (peak == 0.0) return out;

  // Scaling commutes with bilinear resampling, so pre-scaling only keeps the
  // float range tame; the final division makes the maximum exactly 1.
  imaging::FloatImage small{w, h, 1, std::vector<float>(plane)};
  for (std::size_t i = 0; i < plane; ++i) small.values[i] = static_cast<float>(raw[i] / peak);
  const imaging::FloatImage big = imaging::resize_bilinear(small, input.w(), input.h());
  const float top = *std::max_element(big.values.begin(), big.values.end());
  if (!(top > 0.0f)) return out;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::clamp(big.values[i] / top, 0.0f, 1.0f);
  }
  return out;
}

Attribution lime_explain(const Scorer& score, const RgbImage& image,
                         const SuperpixelMap& segments, const LimeParams& params,
                         std::uint64_t seed) {
  check_segments(image, segments);
  const int k = segments.count;
  if (params.num_samples < k + 2) {
    throw InvalidArgument("lime: num_samples " + std::to_string(params.num_samples) +
                          " must be >= superpixel count + 2 (" + std::to_string(k + 2) + ")");
  }
  if (!(params.kernel_width > 0.0)) throw InvalidArgument("lime: kernel_width must be positive");
  if (!(params.ridge_lambda >= 0.0)) throw InvalidArgument("lime: ridge_lambda must be >= 0");

  const std::vector<int> order = canonical_order(segments);
  const auto means = mean_colors(image, segments);
  const int n = params.num_samples;

  Rng rng(seed);
  std::vector<Coalition> masks(static_cast<std::size_t>(n), Coalition(k, true));
  for (int s = 1; s < n; ++s) {
    for (int label : order) masks[s][label] = rng.bernoulli(0.5);
  }

  std::vector<double> y;
  y.reserve(n);
  constexpr int kChunk = 32;
  for (int s0 = 0; s0 < n; s0 += kChunk) {
    std::vector<RgbImage> batch;
    for (int s = s0; s < std::min(n, s0 + kChunk); ++s) {
      batch.push_back(mean_fill(image, segments, means, masks[s]));
    }
    const auto scores = checked_scores(score, batch);
    y.insert(y.end(), scores.begin(), scores.end());
  }

  // Cosine distance to the all-ones mask is 1 - sqrt(on / K).
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto on = std::count(masks[s].begin(), masks[s].end(), true);
    const double d = on == 0 ? 1.0 : 1.0 - std::sqrt(static_cast<double>(on) / k);
    weight[s] = std::exp(-(d * d) / (params.kernel_width * params.kernel_width));
  }

  // Normal equations over [indicators..., 1]; the intercept is unpenalized.
  const int dim = k + 1;
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
  std::vector<double> b(dim, 0.0);
  std::vector<int> active;
  for (int s = 0; s < n; ++s) {
    active.clear();
    for (int j = 0; j < k; ++j) {
      if (masks[s][j]) active.push_back(j);
    }
    active.push_back(k);
    const double ws = weight[s];
    for (int i : active) {
      b[i] += ws * y[s];
      for (int j : active) a[i][j] += ws;
    }
  }
  for (int j = 0; j < k; ++j) a[j][j] += params.ridge_lambda;
  const std::vector<double> beta = solve_linear(std::move(a), std::move(b));

  Attribution out;
  out.granularity = Granularity::kSuperpixel;
  out.values.assign(beta.begin(), beta.begin() + k);
  out.segments = segments;
  return out;
}

std::vector<PartitionNode> build_partition_tree(const SuperpixelMap& segments) {
  const auto centroids = segments.centroids();
  std::vector<int> rank(static_cast<std::size_t>(segments.count));
  const std::vector<int> order = canonical_order(segments);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

  std::vector<PartitionNode> nodes;
  nodes.push_back({order, -1, -1});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].members.size() < 2) continue;
    std::vector<int> m = nodes[i].members;
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (int s : m) {
      for (int d = 0; d < 2; ++d) {
        lo[d] = std::min(lo[d], centroids[s][d]);
        hi[d] = std::max(hi[d], centroids[s][d]);
      }
    }
    const int axis = (hi[1] - lo[1]) > (hi[0] - lo[0]) ? 1 : 0;
    std::sort(m.begin(), m.end(), [&](int p, int q) {
      if (centroids[p][axis] != centroids[q][axis]) {
        return centroids[p][axis] < centroids[q][axis];
      }
      if (centroids[p][1 - axis] != centroids[q][1 - axis]) {
        return centroids[p][1 - axis] < centroids[q][1 - axis];
      }
      return rank[p] < rank[q];
    });
    const auto half = static_cast<long>((m.size() + 1) / 2);
    const int left = static_cast<int>(nodes.size());
    nodes.push_back({std::vector<int>(m.begin(), m.begin() + half), -1, -1});
    nodes.push_back({std::vector<int>(m.begin() + half, m.end()), -1, -1});
    nodes[i].left = left;
    nodes[i].right = left + 1;
  }
  return nodes;
}

Attribution partition_shap(const Scorer& score, const RgbImage& image,
                           const SuperpixelMap& segments, const ShapParams& params,
                           ShapStats* stats) {
  check_segments(image, segments);
  if (params.max_evals < 2) throw InvalidArgument("shap: max_evals must be >= 2");
  const int k = segments.count;
  const auto tree = build_partition_tree(segments);
  const auto means = params.masker == Masker::kMeanFill ? mean_colors(image, segments)
                                                        : decltype(mean_colors(image, segments)){};

  std::unordered_map<Coalition, double, CoalitionHash> memo;
  auto render = [&](const Coalition& on) {
    return params.masker == Masker::kMeanFill ? mean_fill(image, segments, means, on)
                                              : telea_fill(image, segments, on);
  };
  // Scores the coalitions not seen before, in the order given.
  auto evaluate = [&](const std::vector<Coalition>& wanted) {
    constexpr std::size_t kChunk = 16;
    for (std::size_t i = 0; i < wanted.size(); i += kChunk) {
      std::vector<RgbImage> batch;
      const std::size_t end = std::min(wanted.size(), i + kChunk);
      for (std::size_t j = i; j < end; ++j) batch.push_back(render(wanted[j]));
      const auto scores = checked_scores(score, batch);
      for (std::size_t j = i; j < end; ++j) memo.emplace(wanted[j], scores[j - i]);
    }
  };
  auto with = [](Coalition c, const std::vector<int>& members) {
    for (int s : members) c[s] = true;
    return c;
  };

  const Coalition none(k, false), all(k, true);
  evaluate(none == all ? std::vector<Coalition>{all} : std::vector<Coalition>{all, none});

  // attr(node) = sum over contexts c of w_c * (f(c + node) - f(c)). Each
  // split gives a child the parent's contexts with the sibling off and on at
  // half weight each, so the children always sum to the parent.
  struct Context {
    Coalition on;
    double weight;
  };
  std::vector<std::vector<Context>> contexts(tree.size());
  std::vector<double> attr(tree.size(), 0.0);
  contexts[0] = {{none, 1.0}};
  attr[0] = memo.at(all) - memo.at(none);

  std::vector<double> values(static_cast<std::size_t>(k), 0.0);
  int resolved = 0;
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const PartitionNode& node = tree[id];
    if (node.leaf()) {
      values[node.members[0]] += attr[id];
      ++resolved;
      continue;
    }
    const auto& lm = tree[node.left].members;
    const auto& rm = tree[node.right].members;
    std::vector<Coalition> needed;
    for (const Context& c : contexts[id]) {
      for (const auto* half : {&lm, &rm}) {
        Coalition x = with(c.on, *half);
        if (!memo.count(x) && std::find(needed.begin(), needed.end(), x) == needed.end()) {
          needed.push_back(std::move(x));
        }
      }
    }
    if (memo.size() + needed.size() > static_cast<std::size_t>(params.max_evals)) {
      const double share = attr[id] / static_cast<double>(node.members.size());
      for (int s : node.members) values[s] += share;
      continue;
    }
    evaluate(needed);
    for (auto [child, sibling] : {std::pair{node.left, &rm}, std::pair{node.right, &lm}}) {
      const auto& members = tree[child].members;
      double sum = 0.0;
      for (const Context& c : contexts[id]) {
        for (const Coalition& base : {c.on, with(c.on, *sibling)}) {
          const double w = 0.5 * c.weight;
          sum += w * (memo.at(with(base, members)) - memo.at(base));
          contexts[child].push_back({base, w});
        }
      }
      attr[child] = sum;
      queue.push_back(child);
    }
    contexts[id].clear();
  }

  if (stats) {
    stats->evaluations = static_cast<int>(memo.size());
    stats->leaves_resolved = resolved;
  }
  Attribution out;
  out.granularity = Granularity::kSuperpixel;
  out.values = std::move(values);
  out.segments = segments;
  return out;
}

HeatMap attribution_to_heatmap(const Attribution& attribution) {
  attribution.validate();
  const bool per_pixel = attribution.granularity == Granularity::kPixel;
  const int w = per_pixel ? attribution.width : attribution.segments.width;
  const int h = per_pixel ? attribution.height : attribution.segments.height;
  HeatMap out(w, h);
  double peak = 0.0;
  for (double v : attribution.values) peak = std::max(peak, v);
  if (peak <= 0.0) return out;
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    const double v = per_pixel ? attribution.values[p]
                               : attribution.values[attribution.segments.labels[p]];
    out.values[p] = static_cast<float>(std::max(v, 0.0) / peak);
  }
  return out;
}

Scorer make_model_scorer(const model::Model& model, int target_class, int batch) {
  if (target_class < 0 || target_class >= model.config().num_classes) {
    throw InvalidArgument("target class " + std::to_string(target_class) + " outside [0, " +
                          std::to_string(model.config().num_classes) + ")");
  }
  if (batch < 1) throw InvalidArgument("scorer batch must be >= 1");
  return [&model, target_class, batch](const std::vector<RgbImage>& images) {
    std::vector<double> out;
    out.reserve(images.size());
    const int size = model.config().input_size;
    for (std::size_t i = 0; i < images.size(); i += static_cast<std::size_t>(batch)) {
      std::vector<tensor::Tensor> rows;
      const std::size_t end = std::min(images.size(), i + static_cast<std::size_t>(batch));
      for (std::size_t j = i; j < end; ++j) {
        rows.push_back(imaging::to_model_input(images[j], size, model.normalization()));
      }
      const tensor::Tensor logits = model.logits(tensor::stack(rows));
      const int classes = logits.c();
      for (int r = 0; r < logits.n(); ++r) {
        const auto p = tensor::softmax<float>(
            logits.data().subspan(static_cast<std::size_t>(r) * classes, classes));
        out.push_back(p[target_class]);
      }
    }
    return out;
  };
}

Explanation explain(const model::Model& model, const RgbImage& image,
                    const ExplainParams& params) {
  params.validate();
  const int size = model.config().input_size;
  const tensor::Tensor input = imaging::to_model_input(image, size, model.normalization());

  Explanation out;
  out.prediction = model.predict(input).at(0);
  out.target_class = params.target_class.value_or(out.prediction.top1_index);
  if (out.target_class >= model.config().num_classes) {
    throw InvalidArgument("target_class " + std::to_string(out.target_class) +
                          " outside [0, " + std::to_string(model.config().num_classes) + ")");
  }

  if (params.method == Method::kGradCam) {
    out.heatmap = grad_cam(model, input, out.target_class);
    out.attribution.granularity = Granularity::kPixel;
    out.attribution.width = out.heatmap.width;
    out.attribution.height = out.heatmap.height;
    out.attribution.values.assign(out.heatmap.values.begin(), out.heatmap.values.end());
    out.evaluations = 1;
    return out;
  }

  const RgbImage work = imaging::resize_bilinear(image, size, size);
  const Scorer score = make_model_scorer(model, out.target_class);
  if (params.method == Method::kLime) {
    const int k = std::min(params.lime.superpixel_k, size * size);
    const SuperpixelMap segments = imaging::slic_superpixels(work, k, 10.0, 10);
    LimeParams lp = params.lime;
    // SLIC may return fewer regions than requested; keep the sample floor.
    lp.num_samples = std::max(lp.num_samples, segments.count + 2);
    out.attribution = lime_explain(score, work, segments, lp, params.seed);
    out.evaluations = lp.num_samples;
  } else {
    const int k = std::min(params.shap.superpixel_k, size * size);
    const SuperpixelMap segments = imaging::slic_superpixels(work, k, 10.0, 10);
    ShapStats stats;
    out.attribution = partition_shap(score, work, segments, params.shap, &stats);
    out.evaluations = stats.evaluations;
  }
  out.heatmap = attribution_to_heatmap(out.attribution);
  return out;
}

RenderedExplanation render_explanation(const RgbImage& image, const HeatMap& heat,
                                       const imaging::OverlayParams& overlay) {
  const HeatMap sized = heat.width == image.width && heat.height == image.height
                            ? heat
                            : imaging::resize_bilinear(heat, image.width, image.height);
  RenderedExplanation out;
  out.overlay = imaging::render_overlay(image, sized, overlay);
  out.heatmap = RgbImage(sized.width, sized.height);
  for (std::size_t i = 0; i < sized.values.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::lround(sized.values[i] * 255.0f));
    std::fill_n(out.heatmap.pixels.begin() + static_cast<long>(i * 3), 3, v);
  }
  return out;
}

nlohmann::ordered_json prediction_json(const model::PredictionResult& p,
                                       const std::vector<std::string>& labels) {
  nlohmann::ordered_json j;
  j["predicted_class"] = p.top1_label;
  j["class_index"] = p.top1_index;
  j["confidence"] = p.confidence;
  nlohmann::ordered_json probs = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) probs[labels.at(i)] = p.probabilities[i];
  j["probabilities"] = probs;
  return j;
}

nlohmann::ordered_json params_json(const ExplainParams& params,
                                   const imaging::OverlayParams& overlay) {
  nlohmann::ordered_json used;
  used["alpha"] = overlay.global_alpha;
  used["gamma"] = overlay.gamma;
  used["seed"] = params.seed;
  if (params.method == Method::kLime) {
    used["num_samples"] = params.lime.num_samples;
    used["kernel_width"] = params.lime.kernel_width;
    used["ridge_lambda"] = params.lime.ridge_lambda;
    used["superpixel_k"] = params.lime.superpixel_k;
  } else if (params.method == Method::kShap) {
    used["max_evals"] = params.shap.max_evals;
    used["masker"] = to_string(params.shap.masker);
    used["superpixel_k"] = params.shap.superpixel_k;
  }
  return used;
}

}  // namespace uxai::xai
