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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "fs_shim.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_util.hpp"
#include "uxai/checkpoint.hpp"
#include "uxai/errors.hpp"
#include "uxai/image.hpp"
#include "uxai/service.hpp"

namespace uxai::service {
namespace {

using imaging::RgbImage;
using Json = nlohmann::json;
using model::Model;
using testing::randomize_bn;
using testing::tiny_config;

RgbImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

std::string png_of(const RgbImage& img) {
  const auto bytes = imaging::encode_png(img);
  return {bytes.begin(), bytes.end()};
}

std::string jpeg_of(const RgbImage& img) {
  const auto bytes = imaging::encode_jpeg(img);
  return {bytes.begin(), bytes.end()};
}

Model tiny_model(std::uint64_t seed) {
  Model m = Model::build(tiny_config(), seed);
  randomize_bn(m, seed + 1);
  return m;
}

ServiceConfig local_config() {
  ServiceConfig c;
  c.host = "127.0.0.1";
  c.port = 0;
  return c;
}

// A running service on an ephemeral port plus a client for it.
struct Running {
  std::ostringstream log;
  std::unique_ptr<Service> service;
  int port = 0;

  explicit Running(Model m, ServiceConfig c = local_config()) {
    service = std::make_unique<Service>(c, std::move(m), "test-model", log);
    port = service->start();
  }
  explicit Running(ServiceConfig c) {
    service = std::make_unique<Service>(c, log);
    port = service->start();
  }
  httplib::Client client() const {
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(120, 0);
    cli.set_write_timeout(60, 0);
    return cli;
  }
  // Log lines once the server has drained.
  std::vector<std::string> stop_and_log() {
    service->stop();
    std::vector<std::string> lines;
    std::istringstream in(log.str());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
  }
};

httplib::Result post_file(httplib::Client& cli, const std::string& path, const std::string& bytes,
                          const std::string& type = "image/png") {
  httplib::MultipartFormDataItems items = {{"file", bytes, "upload", type}};
  return cli.Post(path, items);
}

Json body_of(const httplib::Result& r) { return Json::parse(r->body); }

// Timing fields are the only nondeterministic part of a response body.
Json without_timing(Json j) {
  j.erase("inference_ms");
  j.erase("explain_ms");
  return j;
}

std::string error_code(const httplib::Result& r) { return body_of(r)["error"]["code"]; }

// ---------------------------------------------------------------------------
// Health and labels

TEST(Health, ReportsLoadedModelAndUptime) {
  Running s(tiny_model(1));
  auto cli = s.client();
  auto a = cli.Get("/health");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->status, 200);
  const Json ja = body_of(a);
  EXPECT_EQ(ja["status"], "ok");
  EXPECT_EQ(ja["model_loaded"], true);
  EXPECT_EQ(ja["model_version"], "test-model");
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  const Json jb = body_of(cli.Get("/health"));
  EXPECT_GE(jb["uptime_s"].get<double>(), ja["uptime_s"].get<double>());
}

TEST(Health, MissingModelDegradesEveryInferenceRoute) {
  ServiceConfig c = local_config();
  c.model_path = "/nonexistent/model.mrtn";
  Running s(c);
  EXPECT_FALSE(s.service->model_loaded());
  auto cli = s.client();
  auto h = cli.Get("/health");
  EXPECT_EQ(h->status, 503);
  EXPECT_EQ(body_of(h)["status"], "degraded");
  EXPECT_EQ(body_of(h)["model_loaded"], false);
  const std::string png = png_of(noise_image(8, 8, 1));
  for (const char* route : {"/predict", "/explain"}) {
    auto r = post_file(cli, route, png);
    EXPECT_EQ(r->status, 503) << route;
    EXPECT_EQ(error_code(r), "model_unavailable");
  }
  EXPECT_EQ(cli.Get("/labels")->status, 503);
  // Preflight does not need a model.
  EXPECT_EQ(cli.Options("/predict")->status, 204);
}

TEST(Health, CorruptCheckpointDegrades) {
  const auto path = std::filesystem::temp_directory_path() / "uxai_service_corrupt.mrtn";
  {
    std::ofstream out(path, std::ios::binary);
    out << "MRTN not really";
  }
  ServiceConfig c = local_config();
  c.model_path = path.string();
  Service s(c, std::cerr);
  EXPECT_FALSE(s.model_loaded());
  EXPECT_NE(s.load_error(), "");
  std::filesystem::remove(path);
}

TEST(Health, LoadsCheckpointFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "uxai_service_ok.mrtn";
  const Model m = tiny_model(2);
  model::save_checkpoint(m, path);
  ServiceConfig c = local_config();
  c.model_path = path.string();
  std::ostringstream log;
  Service s(c, log);
  EXPECT_TRUE(s.model_loaded());
  EXPECT_EQ(s.model_version().size(), 16u);
  std::filesystem::remove(path);
}

TEST(Labels, ListsModelLabels) {
  Model m = tiny_model(3);
  std::vector<std::string> labels;
  for (int i = 0; i < 10; ++i) labels.push_back("label_" + std::to_string(i));
  m.set_labels(labels);
  Running s(std::move(m));
  auto cli = s.client();
  auto r = cli.Get("/labels");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body_of(r)["labels"].get<std::vector<std::string>>(), labels);
}

// ---------------------------------------------------------------------------
// Predict

TEST(Predict, ProbabilitiesFormADistributionAndMatchTheModel) {
  const Model m = tiny_model(4);
  const RgbImage img = noise_image(50, 40, 5);
  const auto expect =
      m.predict(imaging::to_model_input(img, 32, m.normalization())).at(0);
  Running s(tiny_model(4));
  auto cli = s.client();
  auto r = post_file(cli, "/predict", png_of(img));
  ASSERT_EQ(r->status, 200) << r->body;
  const Json j = body_of(r);
  ASSERT_EQ(j["probabilities"].size(), 10u);
  double sum = 0.0;
  int i = 0;
  for (const auto& [label, p] : j["probabilities"].items()) {
    EXPECT_EQ(label, m.labels()[i]);
    EXPECT_DOUBLE_EQ(p.get<double>(), expect.probabilities[i]);
    sum += p.get<double>();
    ++i;
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
  EXPECT_EQ(j["class_index"], expect.top1_index);
  EXPECT_EQ(j["predicted_class"], expect.top1_label);
  EXPECT_DOUBLE_EQ(j["confidence"].get<double>(), expect.confidence);
  EXPECT_GE(j["inference_ms"].get<double>(), 0.0);
  EXPECT_EQ(r->get_header_value("Content-Type"), "application/json; charset=utf-8");
}

TEST(Predict, RepeatedRequestsGiveIdenticalBodies) {
  Running s(tiny_model(6));
  auto cli = s.client();
  const std::string png = png_of(noise_image(64, 64, 7));
  const Json a = without_timing(body_of(post_file(cli, "/predict", png)));
  const Json b = without_timing(body_of(post_file(cli, "/predict", png)));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Predict, AcceptsJpegAndRawBodies) {
  Running s(tiny_model(8));
  auto cli = s.client();
  const RgbImage img = noise_image(40, 40, 9);
  EXPECT_EQ(post_file(cli, "/predict", jpeg_of(img), "image/jpeg")->status, 200);
  auto raw = cli.Post("/predict", png_of(img), "image/png");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 200);
  EXPECT_EQ(without_timing(body_of(raw)).dump(),
            without_timing(body_of(post_file(cli, "/predict", png_of(img)))).dump());
}

// ---------------------------------------------------------------------------
// Upload validation

TEST(Validation, NonImageMimeIs415) {
  Running s(tiny_model(10));
  auto cli = s.client();
  auto r = post_file(cli, "/predict", "hello", "text/plain");
  EXPECT_EQ(r->status, 415);
  EXPECT_EQ(error_code(r), "unsupported_media_type");
  auto raw = cli.Post("/predict", "hello", "text/plain");
  EXPECT_EQ(raw->status, 415);
  auto gif = post_file(cli, "/explain", "GIF89a....", "image/gif");
  EXPECT_EQ(gif->status, 415);
}

TEST(Validation, OversizeIs413) {
  Running s(tiny_model(11));
  auto cli = s.client();
  // 11 MiB with a genuine PNG signature against the 10 MiB default.
  std::string big = png_of(noise_image(4, 4, 1));
  big.resize(11u << 20, '\0');
  auto r = post_file(cli, "/predict", big);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 413);
  EXPECT_EQ(error_code(r), "payload_too_large");
  auto raw = cli.Post("/predict", big, "image/png");
  ASSERT_TRUE(raw);
  EXPECT_EQ(raw->status, 413);
}

TEST(Validation, LimitIsConfigurable) {
  ServiceConfig c = local_config();
  c.max_image_bytes = 100;
  Running s(tiny_model(12), c);
  auto cli = s.client();
  EXPECT_EQ(post_file(cli, "/predict", png_of(noise_image(32, 32, 2)))->status, 413);
}

TEST(Validation, MagicByteSpoofIs415) {
  Running s(tiny_model(13));
  auto cli = s.client();
  const RgbImage img = noise_image(16, 16, 3);
  auto a = post_file(cli, "/predict", jpeg_of(img), "image/png");
  EXPECT_EQ(a->status, 415);
  EXPECT_EQ(error_code(a), "content_type_mismatch");
  auto b = post_file(cli, "/predict", png_of(img), "image/jpeg");
  EXPECT_EQ(b->status, 415);
  EXPECT_EQ(error_code(b), "content_type_mismatch");
}

TEST(Validation, UndecodableIs422) {
  Running s(tiny_model(14));
  auto cli = s.client();
  std::string png = png_of(noise_image(16, 16, 4));
  png.resize(40);
  auto r = post_file(cli, "/predict", png);
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(error_code(r), "undecodable_image");
}

TEST(Validation, MissingOrEmptyFileIs400) {
  Running s(tiny_model(15));
  auto cli = s.client();
  httplib::MultipartFormDataItems items = {{"other", "x", "", "text/plain"}};
  auto r = cli.Post("/predict", items);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(error_code(r), "missing_file");
  EXPECT_EQ(post_file(cli, "/predict", "")->status, 400);
}

TEST(Validation, UploadCheckOrder) {
  EXPECT_FALSE(validate_upload("image/png; charset=binary", "\x89PNG\r\n\x1a\n", 100));
  EXPECT_EQ(validate_upload("IMAGE/PNG", "\x89PNG\r\n\x1a\n", 100), std::nullopt);
  EXPECT_EQ(validate_upload("text/plain", std::string(200, 'x'), 100)->status, 415);
  EXPECT_EQ(validate_upload("image/png", std::string(200, 'x'), 100)->status, 413);
  EXPECT_EQ(validate_upload("image/jpeg", "\xFF\xD8\xFF\xE0", 100), std::nullopt);
  EXPECT_EQ(validate_upload("image/jpeg", "\xFF\xD8", 100)->code, "content_type_mismatch");
}

// ---------------------------------------------------------------------------
// Explain

TEST(Explain, GradcamWithZeroAlphaReturnsOriginalPixels) {
  Running s(tiny_model(16));
  auto cli = s.client();
  const RgbImage img = noise_image(45, 30, 17);
  auto r = post_file(cli, "/explain?method=gradcam&alpha=0", png_of(img));
  ASSERT_EQ(r->status, 200) << r->body;
  const Json j = body_of(r);
  EXPECT_EQ(j["method"], "gradcam");
  const auto overlay = imaging::base64_decode(j["overlay_png_base64"].get<std::string>());
  EXPECT_EQ(imaging::decode_image(overlay), img);
  const auto heat = imaging::decode_image(
      imaging::base64_decode(j["heatmap_png_base64"].get<std::string>()));
  EXPECT_EQ(heat.width, 45);
  EXPECT_EQ(heat.height, 30);
  EXPECT_EQ(j["params_used"]["alpha"], 0.0);
  EXPECT_EQ(j["probabilities"].size(), 10u);
  EXPECT_GE(j["explain_ms"].get<double>(), 0.0);
}

TEST(Explain, LimeWithSeedIsByteIdentical) {
  Running s(tiny_model(18));
  auto cli = s.client();
  const std::string png = png_of(noise_image(40, 40, 19));
  const std::string path = "/explain?method=lime&seed=11&num_samples=60&superpixel_k=8";
  const Json a = body_of(post_file(cli, path, png));
  const Json b = body_of(post_file(cli, path, png));
  ASSERT_TRUE(a.contains("overlay_png_base64")) << a.dump();
  EXPECT_EQ(a["overlay_png_base64"], b["overlay_png_base64"]);
  EXPECT_EQ(a["params_used"]["num_samples"], 60);
  EXPECT_EQ(a["params_used"]["seed"], 11);
}

TEST(Explain, ParamsAcceptedAsFormFields) {
  Running s(tiny_model(20));
  auto cli = s.client();
  httplib::MultipartFormDataItems items = {
      {"file", png_of(noise_image(32, 32, 21)), "a.png", "image/png"},
      {"method", "shap", "", ""},
      {"max_evals", "20", "", ""},
      {"superpixel_k", "6", "", ""},
      {"masker", "mean_fill", "", ""}};
  auto r = cli.Post("/explain", items);
  ASSERT_EQ(r->status, 200) << r->body;
  const Json j = body_of(r);
  EXPECT_EQ(j["method"], "shap");
  EXPECT_EQ(j["params_used"]["masker"], "mean_fill");
  EXPECT_LE(j["params_used"]["model_evaluations"].get<int>(), 20);
}

TEST(Explain, ShapOnConstantModelGivesZeroHeatmap) {
  Model m = tiny_model(22);
  for (float& v : m.classifier.weight.data()) v = 0.0f;
  Running s(std::move(m));
  auto cli = s.client();
  auto r = post_file(cli, "/explain?method=shap&max_evals=30&superpixel_k=6",
                     png_of(noise_image(36, 36, 23)));
  ASSERT_EQ(r->status, 200) << r->body;
  const auto heat = imaging::decode_image(
      imaging::base64_decode(body_of(r)["heatmap_png_base64"].get<std::string>()));
  for (auto v : heat.pixels) ASSERT_EQ(v, 0);
}

TEST(Explain, DefaultAlphaComesFromConfig) {
  ServiceConfig c = local_config();
  c.overlay_alpha = 0.8;
  Running s(tiny_model(24), c);
  auto cli = s.client();
  const Json j = body_of(post_file(cli, "/explain", png_of(noise_image(20, 20, 25))));
  EXPECT_EQ(j["params_used"]["alpha"], 0.8);
  EXPECT_EQ(j["method"], "gradcam");
}

TEST(Explain, RejectsBadParameters) {
  Running s(tiny_model(26));
  auto cli = s.client();
  const std::string png = png_of(noise_image(20, 20, 27));
  auto unknown = post_file(cli, "/explain?method=deeplift", png);
  EXPECT_EQ(unknown->status, 400);
  EXPECT_EQ(error_code(unknown), "unknown_method");
  auto target = post_file(cli, "/explain?target_class=10", png);
  EXPECT_EQ(target->status, 400);
  EXPECT_EQ(error_code(target), "invalid_target_class");
  EXPECT_EQ(error_code(post_file(cli, "/explain?alpha=abc", png)), "invalid_parameter");
  EXPECT_EQ(error_code(post_file(cli, "/explain?alpha=1.5", png)), "invalid_parameter");
  EXPECT_EQ(error_code(post_file(cli, "/explain?method=shap&max_evals=1", png)),
            "invalid_parameter");
  EXPECT_EQ(error_code(post_file(cli, "/explain?method=lime&num_samples=3", png)),
            "invalid_parameter");
  EXPECT_EQ(post_file(cli, "/explain?target_class=3", png)->status, 200);
}

// ---------------------------------------------------------------------------
// Cross-cutting: request ids, logging, CORS

TEST(Plumbing, EveryResponseCarriesARequestIdAndOneLogRecord) {
  Running s(tiny_model(28));
  int requests = 0;
  std::vector<std::string> ids;
  {
    auto cli = s.client();
    const std::string png = png_of(noise_image(20, 20, 29));
    std::vector<httplib::Result> results;
    results.push_back(cli.Get("/health"));
    results.push_back(cli.Get("/labels"));
    results.push_back(post_file(cli, "/predict", png));
    results.push_back(post_file(cli, "/predict", "x", "text/plain"));
    results.push_back(cli.Get("/nope"));
    results.push_back(cli.Options("/explain"));
    httplib::Headers h = {{"X-Request-Id", "client-chosen-id"}};
    results.push_back(cli.Get("/health", h));
    for (auto& r : results) {
      ASSERT_TRUE(r);
      ids.push_back(r->get_header_value("X-Request-Id"));
      EXPECT_FALSE(ids.back().empty()) << r->status;
      ++requests;
    }
    EXPECT_EQ(results[4]->status, 404);
    EXPECT_EQ(body_of(results[4])["error"]["code"], "not_found");
    EXPECT_EQ(body_of(results[4])["error"]["request_id"], ids[4]);
    EXPECT_EQ(body_of(results[3])["error"]["request_id"], ids[3]);
    EXPECT_EQ(ids.back(), "client-chosen-id");
  }
  const auto lines = s.stop_and_log();
  ASSERT_EQ(static_cast<int>(lines.size()), requests);
  std::vector<std::string> logged;
  for (const std::string& line : lines) {
    const Json j = Json::parse(line);
    for (const char* key :
         {"timestamp", "request_id", "method", "route", "status", "latency_ms", "model_version"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["timestamp"].get<std::string>().back(), 'Z');
    EXPECT_LT(line.size(), 400u);  // never carries image bytes
    logged.push_back(j["request_id"]);
  }
  std::sort(logged.begin(), logged.end());
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(logged, ids);
}

TEST(Plumbing, PlainLogFormat) {
  ServiceConfig c = local_config();
  c.log_format = LogFormat::kPlain;
  Running s(tiny_model(30), c);
  s.client().Get("/health");
  const auto lines = s.stop_and_log();
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_NE(lines[0].find("GET /health 200"), std::string::npos) << lines[0];
}

TEST(Plumbing, CorsWildcardAndAllowList) {
  {
    Running s(tiny_model(31));
    auto cli = s.client();
    auto r = cli.Get("/health", {{"Origin", "http://anywhere.example"}});
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
    auto pre = cli.Options("/predict", {{"Origin", "http://anywhere.example"},
                                        {"Access-Control-Request-Method", "POST"}});
    EXPECT_EQ(pre->status, 204);
    EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"),
              std::string::npos);
    EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "*");
  }
  ServiceConfig c = local_config();
  c.cors_origins = {"http://ok.example"};
  Running s(tiny_model(32), c);
  auto cli = s.client();
  auto ok = cli.Get("/health", {{"Origin", "http://ok.example"}});
  EXPECT_EQ(ok->get_header_value("Access-Control-Allow-Origin"), "http://ok.example");
  auto no = cli.Get("/health", {{"Origin", "http://evil.example"}});
  EXPECT_FALSE(no->has_header("Access-Control-Allow-Origin"));
}

// ---------------------------------------------------------------------------
// In-memory processing, concurrency, latency

TEST(InMemory, ShimSeesWrites) {
  testing::fs_shim::begin_watch();
  const auto path = std::filesystem::temp_directory_path() / "uxai_shim_probe.txt";
  { std::ofstream(path) << "x"; }
  std::filesystem::remove(path);
  const auto hits = testing::fs_shim::end_watch();
  EXPECT_GE(hits.size(), 2u);
}

TEST(InMemory, NoFilesystemWritesWhileHandlingRequests) {
  Running s(tiny_model(33));
  auto cli = s.client();
  const RgbImage img = noise_image(48, 40, 34);
  const std::string png = png_of(img), jpg = jpeg_of(img);
  cli.Get("/health");  // connection established outside the window
  testing::fs_shim::begin_watch();
  EXPECT_EQ(post_file(cli, "/predict", png)->status, 200);
  EXPECT_EQ(post_file(cli, "/predict", jpg, "image/jpeg")->status, 200);
  EXPECT_EQ(post_file(cli, "/explain?method=gradcam", png)->status, 200);
  EXPECT_EQ(post_file(cli, "/explain?method=lime&num_samples=40&superpixel_k=6", png)->status,
            200);
  EXPECT_EQ(post_file(cli, "/explain?method=shap&max_evals=20&superpixel_k=6", png)->status, 200);
  EXPECT_EQ(post_file(cli, "/predict", "x", "text/plain")->status, 415);
  cli.Get("/health");
  const auto hits = testing::fs_shim::end_watch();
  EXPECT_TRUE(hits.empty()) << hits.front();
}

TEST(Concurrency, ThirtyTwoParallelRequestsMatchSerial) {
  ServiceConfig c = local_config();
  c.workers = 8;
  Running s(tiny_model(35), c);
  constexpr int kN = 32;
  std::vector<std::string> pngs;
  for (int i = 0; i < kN; ++i) pngs.push_back(png_of(noise_image(40 + i, 40, 100 + i)));

  std::vector<std::string> serial(kN);
  {
    auto cli = s.client();
    for (int i = 0; i < kN; ++i) {
      serial[i] = without_timing(body_of(post_file(cli, "/predict", pngs[i]))).dump();
    }
  }
  std::vector<std::string> parallel(kN);
  std::vector<std::thread> threads;
  for (int i = 0; i < kN; ++i) {
    threads.emplace_back([&, i] {
      auto cli = s.client();
      auto r = post_file(cli, "/predict", pngs[i]);
      parallel[i] = r ? without_timing(body_of(r)).dump() : "transport error";
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < kN; ++i) EXPECT_EQ(parallel[i], serial[i]) << i;
  // Different inputs really were different requests.
  EXPECT_NE(serial[0], serial[1]);
}

TEST(Latency, ReferenceModelPredictWithinBudget) {
  Running s(Model::build(model::reference_config(), 7));
  auto cli = s.client();
  const std::string png = png_of(noise_image(224, 224, 36));
  ASSERT_EQ(post_file(cli, "/predict", png)->status, 200);  // warm-up
  std::vector<double> ms;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = post_file(cli, "/predict", png);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count());
    ASSERT_EQ(r->status, 200);
  }
  std::sort(ms.begin(), ms.end());
  RecordProperty("median_ms", std::to_string(ms[2]));
  EXPECT_LE(ms[2], 500.0) << "median round trip " << ms[2] << " ms";
}

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, EnvironmentOverridesDefaults) {
  const std::map<std::string, std::string> env = {
      {"UXAI_MODEL_PATH", "/models/a.mrtn"},   {"UXAI_BIND", "127.0.0.1:9000"},
      {"UXAI_MAX_IMAGE_BYTES", "2048"},        {"UXAI_OVERLAY_ALPHA", "0.8"},
      {"UXAI_OVERLAY_GAMMA", "2"},             {"UXAI_CORS_ORIGINS", "http://a, http://b"},
      {"UXAI_LOG", "plain"},                   {"UXAI_WORKERS", "3"}};
  auto get = [&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  const ServiceConfig c = config_from_env({}, get);
  EXPECT_EQ(c.model_path, "/models/a.mrtn");
  EXPECT_EQ(c.host, "127.0.0.1");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.max_image_bytes, 2048u);
  EXPECT_EQ(c.overlay_alpha, 0.8);
  EXPECT_EQ(c.overlay_gamma, 2.0);
  EXPECT_EQ(c.cors_origins, (std::vector<std::string>{"http://a", "http://b"}));
  EXPECT_EQ(c.log_format, LogFormat::kPlain);
  EXPECT_EQ(c.workers, 3);
}

TEST(Config, DefaultsWithoutEnvironment) {
  const ServiceConfig c = config_from_env({}, [](const char*) -> const char* { return nullptr; });
  EXPECT_EQ(c.max_image_bytes, 10u << 20);
  EXPECT_EQ(c.overlay_alpha, 0.45);
  EXPECT_EQ(c.cors_origins, (std::vector<std::string>{"*"}));
  EXPECT_EQ(c.log_format, LogFormat::kJson);
}

TEST(Config, MalformedValuesNameTheVariable) {
  auto with = [](const char* key, const char* value) {
    return [key, value](const char* name) -> const char* {
      return std::string(name) == key ? value : nullptr;
    };
  };
  auto message = [&](const char* key, const char* value) {
    try {
      config_from_env({}, with(key, value));
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("UXAI_OVERLAY_ALPHA", "x").find("UXAI_OVERLAY_ALPHA"), std::string::npos);
  EXPECT_NE(message("UXAI_MAX_IMAGE_BYTES", "-5").find("UXAI_MAX_IMAGE_BYTES"), std::string::npos);
  EXPECT_NE(message("UXAI_LOG", "xml").find("UXAI_LOG"), std::string::npos);
  EXPECT_NE(message("UXAI_OVERLAY_ALPHA", "1.5"), "no error");
  EXPECT_NE(message("UXAI_BIND", "nohost"), "no error");
  EXPECT_NE(message("UXAI_WORKERS", "0"), "no error");
}

TEST(Config, ParseBind) {
  EXPECT_EQ(parse_bind("0.0.0.0:8080"), (std::pair<std::string, int>{"0.0.0.0", 8080}));
  EXPECT_EQ(parse_bind("[::1]:0"), (std::pair<std::string, int>{"::1", 0}));
  EXPECT_THROW(parse_bind(":80"), InvalidArgument);
  EXPECT_THROW(parse_bind("host:70000"), InvalidArgument);
  EXPECT_THROW(parse_bind("host:"), InvalidArgument);
}

TEST(Config, BindFailureIsReported) {
  Running first(tiny_model(37));
  ServiceConfig c = local_config();
  c.port = first.port;
  std::ostringstream log;
  Service second(c, tiny_model(38), "v", log);
  EXPECT_THROW(second.bind(), InvalidState);
}

}  // namespace
}  // namespace uxai::service
