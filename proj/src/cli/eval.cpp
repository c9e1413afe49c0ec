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
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "uxai/cli.hpp"
#include "uxai/errors.hpp"

namespace uxai::cli {

EvalReport make_report(const std::vector<std::string>& labels, const std::vector<int>& truth,
                       const std::vector<int>& predicted, double total_latency_ms) {
  if (truth.size() != predicted.size()) {
    throw InvalidArgument("make_report: truth and prediction counts differ");
  }
  const int k = static_cast<int>(labels.size());
  EvalReport r;
  r.labels = labels;
  r.confusion.assign(k, std::vector<int>(k, 0));
  r.support.assign(k, 0);
  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  r.total = static_cast<int>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k) {
      throw InvalidArgument("make_report: class index out of range");
    }
    ++r.confusion[truth[i]][predicted[i]];
  }
  int correct = 0;
  for (int c = 0; c < k; ++c) {
    int column = 0;
    for (int t = 0; t < k; ++t) column += r.confusion[t][c];
    for (int p = 0; p < k; ++p) r.support[c] += r.confusion[c][p];
    correct += r.confusion[c][c];
    if (column > 0) r.precision[c] = static_cast<double>(r.confusion[c][c]) / column;
    if (r.support[c] > 0) r.recall[c] = static_cast<double>(r.confusion[c][c]) / r.support[c];
  }
  r.accuracy = r.total > 0 ? static_cast<double>(correct) / r.total : 0.0;
  r.mean_latency_ms = r.total > 0 ? total_latency_ms / r.total : 0.0;
  return r;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["accuracy"] = accuracy;
  j["mean_latency_ms"] = mean_latency_ms;
  j["labels"] = labels;
  j["per_class"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    j["per_class"].push_back({{"label", labels[c]},
                              {"support", support[c]},
                              {"precision", precision[c]},
                              {"recall", recall[c]}});
  }
  j["confusion_matrix"] = confusion;
  return j;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "accuracy %.4f (%d images), mean latency %.2f ms\n", accuracy,
                total, mean_latency_ms);
  out << line;
  std::size_t width = 5;
  for (const auto& l : labels) width = std::max(width, l.size());
  std::snprintf(line, sizeof line, "%-*s %9s %9s %8s\n", static_cast<int>(width), "class",
                "precision", "recall", "support");
  out << line;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::snprintf(line, sizeof line, "%-*s %9.4f %9.4f %8d\n", static_cast<int>(width),
                  labels[c].c_str(), precision[c], recall[c], support[c]);
    out << line;
  }
  out << "confusion (rows true, columns predicted)\n";
  for (const auto& row : confusion) {
    for (std::size_t p = 0; p < row.size(); ++p) out << (p ? " " : "") << row[p];
    out << '\n';
  }
  return out.str();
}

EvalReport evaluate(const std::vector<std::string>& labels,
                    const std::vector<ManifestEntry>& entries, const fs::path& root,
                    const Classifier& classify) {
  std::vector<int> truth;
  truth.reserve(entries.size());
  for (const ManifestEntry& e : entries) {
    const auto it = std::find(labels.begin(), labels.end(), e.label);
    if (it == labels.end()) {
      throw InvalidArgument("manifest class '" + e.label +
                            "' is not a label of the checkpoint");
    }
    truth.push_back(static_cast<int>(it - labels.begin()));
  }
  std::vector<int> predicted;
  predicted.reserve(entries.size());
  double latency_ms = 0.0;
  for (const ManifestEntry& e : entries) {
    std::ifstream in(root / e.path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + (root / e.path).string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};
    const RgbImage img = imaging::decode_image(bytes);
    const auto t0 = std::chrono::steady_clock::now();
    predicted.push_back(classify(img));
    latency_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
  }
  return make_report(labels, truth, predicted, latency_ms);
}

Classifier model_classifier(const model::Model& m) {
  return [&m](const RgbImage& img) {
    return m.predict(imaging::to_model_input(img, m.config().input_size, m.normalization()))
        .at(0)
        .top1_index;
  };
}

}  // namespace uxai::cli
