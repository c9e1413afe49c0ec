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

// The commands behind the `uxai` executable, as a library so tests can
// drive them without spawning processes.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uxai/colormap.hpp"
#include "uxai/image.hpp"
#include "uxai/model.hpp"
#include "uxai/random.hpp"
#include "uxai/service.hpp"
#include "uxai/xai.hpp"

namespace uxai::cli {

namespace fs = std::filesystem;
using imaging::RgbImage;

// ---------------------------------------------------------------------------
// Manifests: UTF-8, one path per line relative to a root directory; the
// class is the name of the file's parent directory.

struct ManifestEntry {
  std::string path;
  std::string label;
};

std::vector<ManifestEntry> read_manifest(const fs::path& manifest);
void write_manifest(const fs::path& manifest, const std::vector<std::string>& paths);

// ---------------------------------------------------------------------------
// split

enum Partition { kTrain = 0, kVal = 1, kTest = 2 };
inline constexpr std::array<const char*, 3> kPartitionNames = {"train", "val", "test"};

struct SplitSpec {
  std::array<double, 3> fractions = {0.6, 0.2, 0.2};
  // When non-empty, files whose names share the prefix before the first
  // occurrence of this delimiter form one group and stay together.
  std::string group_delimiter;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-partition counts for n items: floors of n * f, with the leftover
// units going to the largest fractional parts (lower index on ties).
std::array<int, 3> largest_remainder(int n, const std::array<double, 3>& fractions);

// The file name up to the first delimiter; the whole stem when the
// delimiter is empty or absent.
std::string group_key(const std::string& filename, const std::string& delimiter);

struct SplitPlan {
  std::array<std::vector<std::string>, 3> paths;  // "class/file", sorted
  std::map<std::string, std::array<int, 3>> counts;
};

// `files` maps class name to file names inside that class directory.
SplitPlan plan_split(const std::map<std::string, std::vector<std::string>>& files,
                     const SplitSpec& spec);

// Scans one subdirectory per class and writes train.txt, val.txt and
// test.txt into out_dir. Throws InvalidArgument naming an empty class.
SplitPlan cmd_split(const fs::path& dataset_dir, const fs::path& out_dir, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic dataset: one procedural primitive per class on a noisy
// background, then the training augmentations.

const std::vector<std::string>& shape_names();

struct SyntheticSpec {
  int image_size = 64;
  double noise_stddev = 10.0;
  bool augment = true;
};

RgbImage render_shape(int class_index, const SyntheticSpec& spec, Rng& rng);

struct Dataset {
  std::vector<RgbImage> images;
  std::vector<int> labels;
};

// Classes interleaved: sample i has label i % 10.
Dataset make_synthetic(int per_class, const SyntheticSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// train

struct TrainConfig {
  int epochs = 8;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  int train_per_class = 200;
  int val_per_class = 40;
  int test_per_class = 100;
  int image_size = 64;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;  // mean training cross-entropy
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;  // at the epoch's first step
  double seconds = 0.0;
};

struct TrainReport {
  // Training-set cross-entropy of the untrained model with batch
  // statistics, followed by one entry per epoch.
  double initial_loss = 0.0;
  std::vector<EpochStats> epochs;
  double test_accuracy = 0.0;
  double seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Trains the student architecture from seed. Throws NumericError when the
// loss stops being finite. `test_export`, when set, receives the held-out
// images as <dir>/<label>/<index>.png plus a test.txt manifest.
TrainReport train(const TrainConfig& config, model::Model& out, std::ostream& progress,
                  const std::optional<fs::path>& test_export = std::nullopt);

double accuracy(const model::Model& m, const Dataset& data, int batch_size = 64);

// ---------------------------------------------------------------------------
// eval

struct EvalReport {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::vector<int> support;                 // row sums
  std::vector<double> precision;            // 0 for a never-predicted class
  std::vector<double> recall;               // 0 for an absent class
  int total = 0;
  double accuracy = 0.0;
  double mean_latency_ms = 0.0;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

EvalReport make_report(const std::vector<std::string>& labels, const std::vector<int>& truth,
                       const std::vector<int>& predicted, double total_latency_ms);

using Classifier = std::function<int(const RgbImage&)>;

// Throws InvalidArgument when a manifest class is not among `labels`.
EvalReport evaluate(const std::vector<std::string>& labels,
                    const std::vector<ManifestEntry>& entries, const fs::path& root,
                    const Classifier& classify);

Classifier model_classifier(const model::Model& m);

// ---------------------------------------------------------------------------
// explain and predict

// Writes <stem>.<method>.overlay.png, <stem>.<method>.heatmap.png and
// <stem>.json per image. Failures are recorded in the sidecar and the
// remaining images still run. Returns 0 on full success, 1 otherwise.
int cmd_explain(const model::Model& m, const std::vector<fs::path>& images,
                const xai::ExplainParams& params, const imaging::OverlayParams& overlay,
                const fs::path& out_dir, std::ostream& log);

// One JSON object per line per image. Returns 0 on full success, 1 otherwise.
int cmd_predict(const model::Model& m, const std::vector<fs::path>& images, std::ostream& out);

// ---------------------------------------------------------------------------
// serve

struct ServeFlags {
  std::optional<std::string> model_path;
  std::optional<std::string> bind;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<std::size_t> max_image_bytes;
  std::optional<std::vector<std::string>> cors_origins;
  std::optional<std::string> log_format;
  std::optional<int> workers;
};

// Defaults, then UXAI_* variables, then flags.
service::ServiceConfig resolve_serve_config(const ServeFlags& flags,
                                            const service::Getenv& getenv = {});

}  // namespace uxai::cli
