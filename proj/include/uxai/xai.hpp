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

// Attribution methods: Grad-CAM on the head activations, LIME over
// superpixels, and a partition (Owen) approximation of Shapley values.
//
// LIME and SHAP only need a scoring function, so they are written against
// `Scorer` and bound to a classifier by the wrappers at the bottom.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uxai/colormap.hpp"
#include "uxai/image.hpp"
#include "uxai/model.hpp"
#include "uxai/superpixels.hpp"

namespace uxai::xai {

using imaging::HeatMap;
using imaging::RgbImage;
using imaging::SuperpixelMap;

enum class Method { kGradCam, kLime, kShap };
enum class Masker { kTeleaInpaint, kMeanFill };

Method method_from_string(const std::string& name);  // throws InvalidArgument
std::string to_string(Method method);
Masker masker_from_string(const std::string& name);
std::string to_string(Masker masker);

struct LimeParams {
  int num_samples = 1000;
  double kernel_width = 0.25;
  double ridge_lambda = 1.0;
  int superpixel_k = 50;
};

struct ShapParams {
  int max_evals = 500;
  Masker masker = Masker::kTeleaInpaint;
  int superpixel_k = 50;
};

struct ExplainParams {
  Method method = Method::kGradCam;
  std::optional<int> target_class;  // top-1 when unset
  LimeParams lime;
  ShapParams shap;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Granularity { kPixel, kSuperpixel };

struct Attribution {
  Granularity granularity = Granularity::kSuperpixel;
  std::vector<double> values;  // one per superpixel, or row-major per pixel
  SuperpixelMap segments;      // superpixel granularity only
  int width = 0;               // pixel granularity only
  int height = 0;

  void validate() const;
};

// Target-class score for each image of a batch. Must be deterministic.
using Scorer = std::function<std::vector<double>(const std::vector<RgbImage>&)>;

// Class activation map at the input resolution, normalized by its maximum.
HeatMap grad_cam(const model::Model& model, const tensor::Tensor& input, int target_class);

// Weighted ridge fit of the target score on superpixel on/off indicators.
// Off superpixels are painted with their own mean color. Random masks are
// drawn over superpixels in scan order of their first pixel, so relabeling
// the map permutes the coefficients and nothing else.
Attribution lime_explain(const Scorer& score, const RgbImage& image,
                         const SuperpixelMap& segments, const LimeParams& params,
                         std::uint64_t seed);

struct ShapStats {
  int evaluations = 0;  // distinct coalitions scored
  int leaves_resolved = 0;
};

// Owen values over a balanced binary hierarchy of superpixels. Attributions
// sum to f(image) - f(everything masked) exactly, whatever the budget.
Attribution partition_shap(const Scorer& score, const RgbImage& image,
                           const SuperpixelMap& segments, const ShapParams& params,
                           ShapStats* stats = nullptr);

// Balanced bisection of superpixel centroids along the wider axis of each
// node's bounding box. Each node lists its members; children partition them.
struct PartitionNode {
  std::vector<int> members;
  int left = -1;
  int right = -1;
  bool leaf() const { return left < 0; }
};
std::vector<PartitionNode> build_partition_tree(const SuperpixelMap& segments);

// Positive part of the attribution painted per pixel and divided by its
// maximum; all zero when nothing is positive.
HeatMap attribution_to_heatmap(const Attribution& attribution);

// ---------------------------------------------------------------------------
// Classifier bindings.

// Softmax probability of `target_class`, evaluated in batches of `batch`.
Scorer make_model_scorer(const model::Model& model, int target_class, int batch = 16);

struct Explanation {
  int target_class = 0;
  model::PredictionResult prediction;
  Attribution attribution;
  HeatMap heatmap;  // at the model input resolution
  int evaluations = 0;
};

// Runs the configured method on an image at its native size. LIME and SHAP
// segment and perturb the image resampled to the model input size.
Explanation explain(const model::Model& model, const RgbImage& image,
                    const ExplainParams& params);

// ---------------------------------------------------------------------------
// Export, shared by the service and the command line.

struct RenderedExplanation {
  imaging::RgbaImage overlay;
  RgbImage heatmap;  // gray, round(255 * h) in every channel
};

// Both images at the size of `image`.
RenderedExplanation render_explanation(const RgbImage& image, const HeatMap& heat,
                                       const imaging::OverlayParams& overlay);

// {predicted_class, class_index, confidence, probabilities{label: p}}.
nlohmann::ordered_json prediction_json(const model::PredictionResult& p,
                                       const std::vector<std::string>& labels);

// The parameters that apply to params.method, plus the seed and overlay.
nlohmann::ordered_json params_json(const ExplainParams& params,
                                   const imaging::OverlayParams& overlay);

}  // namespace uxai::xai
