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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "uxai/cli.hpp"
#include "uxai/errors.hpp"
#include "uxai/training.hpp"

namespace uxai::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<tensor::Tensor> preprocess(const Dataset& d, const model::Model& m) {
  std::vector<tensor::Tensor> rows;
  rows.reserve(d.images.size());
  for (const RgbImage& img : d.images) {
    rows.push_back(imaging::to_model_input(img, m.config().input_size, m.normalization()));
  }
  return rows;
}

tensor::Tensor gather(const std::vector<tensor::Tensor>& rows, std::span<const std::size_t> idx) {
  std::vector<tensor::Tensor> picked;
  picked.reserve(idx.size());
  for (std::size_t i : idx) picked.push_back(rows[i]);
  return tensor::stack(picked);
}

double accuracy_of(const model::Model& m, const std::vector<tensor::Tensor>& rows,
                   const std::vector<int>& labels, int batch_size) {
  if (rows.empty()) return 0.0;
  int correct = 0;
  for (std::size_t start = 0; start < rows.size(); start += batch_size) {
    const std::size_t end = std::min(rows.size(), start + batch_size);
    std::vector<std::size_t> idx(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const auto preds = m.predict(gather(rows, idx));
    for (std::size_t k = 0; k < preds.size(); ++k) {
      correct += preds[k].top1_index == labels[start + k];
    }
  }
  return static_cast<double>(correct) / rows.size();
}

std::optional<std::string> first_non_finite(model::Model& m) {
  for (const model::ParamRef& p : m.parameters()) {
    for (float v : p.values) {
      if (!std::isfinite(v)) return p.name;
    }
  }
  return std::nullopt;
}

void export_test_set(const Dataset& d, const fs::path& dir) {
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < d.images.size(); ++i) {
    const std::string& label = shape_names()[d.labels[i]];
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.png", i);
    const std::string rel = label + "/" + name;
    fs::create_directories(dir / label);
    const auto png = imaging::encode_png(d.images[i]);
    std::ofstream out(dir / rel, std::ios::binary);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw InvalidArgument("cannot write " + (dir / rel).string());
    paths.push_back(rel);
  }
  write_manifest(dir / "test.txt", paths);
}

}  // namespace

void TrainConfig::validate() const {
  auto positive = [](bool ok, const char* field) {
    if (!ok) throw InvalidArgument(std::string("train ") + field + " must be positive");
  };
  positive(epochs > 0, "epochs");
  positive(batch_size > 1, "batch_size (at least 2)");
  positive(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate (or zero)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("train momentum must be in [0, 1)");
  positive(weight_decay >= 0.0, "weight_decay (or zero)");
  positive(train_per_class > 0, "train_per_class");
  positive(val_per_class > 0, "val_per_class");
  positive(test_per_class > 0, "test_per_class");
  if (image_size < 32 || image_size % 32 != 0) {
    throw InvalidArgument("train image_size must be a positive multiple of 32");
  }
  if (train_per_class * static_cast<int>(shape_names().size()) < batch_size) {
    throw InvalidArgument("train batch_size exceeds the training set");
  }
}

nlohmann::ordered_json TrainReport::to_json() const {
  nlohmann::ordered_json j;
  j["initial_loss"] = initial_loss;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const EpochStats& e : epochs) {
    j["epochs"].push_back({{"epoch", e.epoch},
                           {"loss", e.loss},
                           {"train_accuracy", e.train_accuracy},
                           {"val_accuracy", e.val_accuracy},
                           {"learning_rate", e.learning_rate},
                           {"seconds", e.seconds}});
  }
  j["test_accuracy"] = test_accuracy;
  j["seconds"] = seconds;
  return j;
}

double accuracy(const model::Model& m, const Dataset& data, int batch_size) {
  return accuracy_of(m, preprocess(data, m), data.labels, batch_size);
}

TrainReport train(const TrainConfig& config, model::Model& out, std::ostream& progress,
                  const std::optional<fs::path>& test_export) {
  config.validate();
  const auto t0 = Clock::now();

  SyntheticSpec synth;
  synth.image_size = config.image_size;
  Rng data_rng(config.seed);
  const Dataset train_set = make_synthetic(config.train_per_class, synth, data_rng);
  const Dataset val_set = make_synthetic(config.val_per_class, synth, data_rng);
  const Dataset test_set = make_synthetic(config.test_per_class, synth, data_rng);
  if (test_export) export_test_set(test_set, *test_export);

  model::ArchitectureConfig arch = model::student_config();
  arch.input_size = config.image_size;
  arch.num_classes = static_cast<int>(shape_names().size());
  model::Model m = model::Model::build(arch, config.seed);
  m.set_labels(shape_names());

  const auto train_rows = preprocess(train_set, m);
  const auto val_rows = preprocess(val_set, m);
  const std::size_t n = train_rows.size();
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const long steps_per_epoch = static_cast<long>(n / batch);  // drops the ragged tail
  const long total_steps = steps_per_epoch * config.epochs;

  model::Model grads = model::zeros_like(m);
  model::Sgd sgd(m, config.momentum, config.weight_decay);
  Rng order_rng(config.seed ^ 0x5851F42D4C957F2Dull);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto batch_loss = [&](std::span<const std::size_t> idx, double bn_momentum) {
    std::vector<int> labels;
    for (std::size_t i : idx) labels.push_back(train_set.labels[i]);
    return model::forward_backward(m, grads, gather(train_rows, idx), labels, bn_momentum);
  };

  TrainReport report;
  {
    // Zero BN momentum keeps the running statistics untouched.
    double sum = 0.0;
    for (long s = 0; s < steps_per_epoch; ++s) {
      sum += batch_loss(std::span(order).subspan(s * batch, batch), 0.0);
    }
    report.initial_loss = sum / steps_per_epoch;
    progress << "epoch 0/" << config.epochs << "  loss " << report.initial_loss << '\n';
  }

  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto te = Clock::now();
    order_rng.shuffle(order.begin(), order.end());
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = model::cosine_lr(config.learning_rate, step, total_steps);
    double sum = 0.0;
    for (long s = 0; s < steps_per_epoch; ++s, ++step) {
      auto diverged = [&](const std::string& what) {
        return NumericError("training diverged at epoch " + std::to_string(epoch) + " step " +
                            std::to_string(s) + ": " + what + "; lower the learning rate");
      };
      double loss = 0.0;
      try {
        loss = batch_loss(std::span(order).subspan(s * batch, batch), 0.1);
      } catch (const InvalidArgument& e) {
        // Shapes were validated up front, so this is overflow reaching softmax.
        throw diverged(e.what());
      }
      if (!std::isfinite(loss)) throw diverged("loss is " + std::to_string(loss));
      sum += loss;
      sgd.step(m, grads, model::cosine_lr(config.learning_rate, step, total_steps));
      if (const auto bad = first_non_finite(m)) {
        throw diverged(*bad + " is no longer finite");
      }
    }
    stats.loss = sum / steps_per_epoch;
    stats.train_accuracy = accuracy_of(m, train_rows, train_set.labels, 64);
    stats.val_accuracy = accuracy_of(m, val_rows, val_set.labels, 64);
    stats.seconds = seconds_since(te);
    report.epochs.push_back(stats);
    char line[160];
    std::snprintf(line, sizeof line,
                  "epoch %d/%d  loss %.4f  train_acc %.4f  val_acc %.4f  lr %.4f  %.1fs", epoch,
                  config.epochs, stats.loss, stats.train_accuracy, stats.val_accuracy,
                  stats.learning_rate, stats.seconds);
    progress << line << std::endl;
  }

  report.test_accuracy = accuracy(m, test_set);
  report.seconds = seconds_since(t0);
  progress << "test_acc " << report.test_accuracy << "  total " << report.seconds << "s"
           << std::endl;
  out = std::move(m);
  return report;
}

}  // namespace uxai::cli
