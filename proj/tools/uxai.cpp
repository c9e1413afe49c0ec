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

// uxai: split, train, eval, explain, predict and serve.
//
// Exit codes: 0 success, 1 partial failure (some inputs failed), 2 usage
// or fatal error.

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "uxai/checkpoint.hpp"
#include "uxai/cli.hpp"
#include "uxai/errors.hpp"

namespace {

namespace cli = uxai::cli;
namespace fs = std::filesystem;

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw uxai::InvalidArgument("cannot write " + path.string());
}

struct ExplainFlags {
  std::string method = "gradcam";
  std::optional<int> target;
  std::optional<double> alpha;
  double gamma = 1.0;
  uxai::xai::ExplainParams params;
  std::string masker = "telea_inpaint";
  std::optional<int> superpixel_k;
};

int run_serve(const cli::ServeFlags& flags) {
  const uxai::service::ServiceConfig config = cli::resolve_serve_config(flags);
  // Signals are taken synchronously on a dedicated thread; every other
  // thread inherits the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  uxai::service::Service service(config, std::cerr);
  if (!service.model_loaded()) {
    std::cerr << "warning: serving degraded, model not loaded: " << service.load_error() << '\n';
  }
  int port = 0;
  try {
    port = service.bind();
  } catch (const uxai::InvalidState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << "listening on " << config.host << ":" << port << std::endl;
  std::thread([&service, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  }).detach();
  service.listen();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uxai: explainable image classification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file of option defaults ([command] sections)");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for shuffling, initialization and sampling");

  // split
  auto* split = app.add_subcommand("split", "Write train/val/test manifests for a class-per-directory dataset");
  std::string dataset_dir, split_out;
  std::vector<double> fractions = {0.6, 0.2, 0.2};
  cli::SplitSpec split_spec;
  split->add_option("dataset", dataset_dir, "Directory with one subdirectory per class")->required();
  split->add_option("--out", split_out, "Manifest directory (default: the dataset directory)");
  split->add_option("--fractions", fractions, "train val test fractions")->expected(3)->delimiter(',');
  split->add_option("--group-delimiter", split_spec.group_delimiter,
                    "Keep files whose names share the prefix before this string together");

  // train
  auto* train = app.add_subcommand("train", "Train the student model on the synthetic shape dataset");
  cli::TrainConfig train_config;
  std::string train_out = "model.mrtn", train_report, export_test;
  train->add_option("--out", train_out, "Checkpoint path")->capture_default_str();
  train->add_option("--epochs", train_config.epochs)->capture_default_str();
  train->add_option("--batch-size", train_config.batch_size)->capture_default_str();
  train->add_option("--lr", train_config.learning_rate, "Base learning rate (cosine decay)")->capture_default_str();
  train->add_option("--momentum", train_config.momentum)->capture_default_str();
  train->add_option("--weight-decay", train_config.weight_decay)->capture_default_str();
  train->add_option("--train-per-class", train_config.train_per_class)->capture_default_str();
  train->add_option("--val-per-class", train_config.val_per_class)->capture_default_str();
  train->add_option("--test-per-class", train_config.test_per_class)->capture_default_str();
  train->add_option("--image-size", train_config.image_size)->capture_default_str();
  train->add_option("--report", train_report, "Write the training report as JSON");
  train->add_option("--export-test", export_test, "Write the held-out images and test.txt here");

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy, per-class precision/recall and confusion matrix");
  std::string eval_model, eval_manifest, eval_root, eval_json;
  eval->add_option("--model", eval_model, "Checkpoint")->required();
  eval->add_option("manifest", eval_manifest, "Manifest of class/file paths")->required();
  eval->add_option("--root", eval_root, "Directory the paths are relative to (default: manifest directory)");
  eval->add_option("--json", eval_json, "Report path (default: <manifest>.eval.json)");

  // explain
  auto* explain = app.add_subcommand("explain", "Write overlay and heatmap PNGs plus a JSON sidecar per image");
  std::string explain_model, explain_out = ".";
  std::vector<std::string> explain_images;
  ExplainFlags ef;
  explain->add_option("--model", explain_model, "Checkpoint")->required();
  explain->add_option("images", explain_images, "Input PNG or JPEG files")->required();
  explain->add_option("--method", ef.method, "gradcam, lime or shap")->capture_default_str();
  explain->add_option("--target", ef.target, "Class to explain (default: predicted)");
  explain->add_option("--out-dir", explain_out)->capture_default_str();
  explain->add_option("--alpha", ef.alpha, "Overlay opacity in [0, 1] (default 0.45)");
  explain->add_option("--gamma", ef.gamma)->capture_default_str();
  explain->add_option("--num-samples", ef.params.lime.num_samples)->capture_default_str();
  explain->add_option("--kernel-width", ef.params.lime.kernel_width)->capture_default_str();
  explain->add_option("--ridge-lambda", ef.params.lime.ridge_lambda)->capture_default_str();
  explain->add_option("--superpixel-k", ef.superpixel_k, "Superpixel count for lime and shap (default 50)");
  explain->add_option("--max-evals", ef.params.shap.max_evals)->capture_default_str();
  explain->add_option("--masker", ef.masker, "telea_inpaint or mean_fill")->capture_default_str();

  // predict
  auto* predict = app.add_subcommand("predict", "Print one JSON prediction per image");
  std::string predict_model;
  std::vector<std::string> predict_images;
  predict->add_option("--model", predict_model, "Checkpoint")->required();
  predict->add_option("images", predict_images, "Input PNG or JPEG files")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service (flags override UXAI_* variables)");
  cli::ServeFlags sf;
  serve->add_option("--model", sf.model_path, "Checkpoint (UXAI_MODEL_PATH)");
  serve->add_option("--bind", sf.bind, "host:port, port 0 for ephemeral (UXAI_BIND)");
  serve->add_option("--alpha", sf.alpha, "Default overlay opacity (UXAI_OVERLAY_ALPHA)");
  serve->add_option("--gamma", sf.gamma, "Default overlay gamma (UXAI_OVERLAY_GAMMA)");
  serve->add_option("--max-image-bytes", sf.max_image_bytes, "Upload limit (UXAI_MAX_IMAGE_BYTES)");
  serve->add_option("--cors", sf.cors_origins, "Allowed origins (UXAI_CORS_ORIGINS)")->delimiter(',');
  serve->add_option("--log", sf.log_format, "json or plain (UXAI_LOG)");
  serve->add_option("--workers", sf.workers, "Request worker threads (UXAI_WORKERS)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*split) {
      split_spec.fractions = {fractions[0], fractions[1], fractions[2]};
      split_spec.seed = seed;
      const fs::path out = split_out.empty() ? fs::path(dataset_dir) : fs::path(split_out);
      const cli::SplitPlan plan = cli::cmd_split(dataset_dir, out, split_spec);
      for (const auto& [label, c] : plan.counts) {
        std::cout << label << ": " << c[0] << " train, " << c[1] << " val, " << c[2] << " test\n";
      }
      std::cout << "manifests written to " << out.string() << '\n';
      return 0;
    }
    if (*train) {
      train_config.seed = seed;
      uxai::model::Model m;
      std::optional<fs::path> export_dir;
      if (!export_test.empty()) export_dir = export_test;
      const cli::TrainReport report = cli::train(train_config, m, std::cout, export_dir);
      uxai::model::save_checkpoint(m, train_out);
      if (!train_report.empty()) write_json(train_report, report.to_json());
      std::cout << "checkpoint written to " << train_out << '\n';
      return 0;
    }
    if (*eval) {
      const auto m = uxai::model::load_checkpoint(eval_model);
      const fs::path manifest(eval_manifest);
      const fs::path root = eval_root.empty() ? manifest.parent_path() : fs::path(eval_root);
      const cli::EvalReport report =
          cli::evaluate(m.labels(), cli::read_manifest(manifest), root, cli::model_classifier(m));
      std::cout << report.to_text();
      const fs::path json = eval_json.empty()
                                ? fs::path(manifest).replace_extension(".eval.json")
                                : fs::path(eval_json);
      write_json(json, report.to_json());
      std::cout << "report written to " << json.string() << '\n';
      return 0;
    }
    if (*explain) {
      const auto m = uxai::model::load_checkpoint(explain_model);
      ef.params.method = uxai::xai::method_from_string(ef.method);
      ef.params.target_class = ef.target;
      ef.params.seed = seed;
      ef.params.shap.masker = uxai::xai::masker_from_string(ef.masker);
      if (ef.superpixel_k) {
        ef.params.lime.superpixel_k = *ef.superpixel_k;
        ef.params.shap.superpixel_k = *ef.superpixel_k;
      }
      uxai::imaging::OverlayParams overlay;
      overlay.global_alpha = ef.alpha.value_or(uxai::service::ServiceConfig{}.overlay_alpha);
      overlay.gamma = ef.gamma;
      std::vector<fs::path> images(explain_images.begin(), explain_images.end());
      return cli::cmd_explain(m, images, ef.params, overlay, explain_out, std::cerr);
    }
    if (*predict) {
      const auto m = uxai::model::load_checkpoint(predict_model);
      std::vector<fs::path> images(predict_images.begin(), predict_images.end());
      return cli::cmd_predict(m, images, std::cout);
    }
    if (*serve) return run_serve(sf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
