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

#include <fstream>
#include <iterator>

#include "uxai/cli.hpp"
#include "uxai/errors.hpp"

namespace uxai::cli {
namespace {

RgbImage read_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), {}};
  return imaging::decode_image(bytes);
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InvalidArgument("cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text << '\n';
  if (!out) throw InvalidArgument("cannot write " + path.string());
}

}  // namespace

int cmd_explain(const model::Model& m, const std::vector<fs::path>& images,
                const xai::ExplainParams& params, const imaging::OverlayParams& overlay,
                const fs::path& out_dir, std::ostream& log) {
  params.validate();
  fs::create_directories(out_dir);
  const std::string method = xai::to_string(params.method);
  int failures = 0;
  for (const fs::path& path : images) {
    const std::string stem = path.stem().string();
    nlohmann::ordered_json sidecar;
    sidecar["source"] = path.string();
    sidecar["method"] = method;
    try {
      const RgbImage image = read_image(path);
      const xai::Explanation e = xai::explain(m, image, params);
      const xai::RenderedExplanation r = xai::render_explanation(image, e.heatmap, overlay);
      const std::string overlay_name = stem + "." + method + ".overlay.png";
      const std::string heatmap_name = stem + "." + method + ".heatmap.png";
      write_bytes(out_dir / overlay_name, imaging::encode_png(r.overlay));
      write_bytes(out_dir / heatmap_name, imaging::encode_png(r.heatmap));
      sidecar["target_class"] = e.target_class;
      sidecar["prediction"] = xai::prediction_json(e.prediction, m.labels());
      nlohmann::ordered_json used = xai::params_json(params, overlay);
      used["model_evaluations"] = e.evaluations;
      sidecar["params_used"] = used;
      sidecar["overlay_png"] = overlay_name;
      sidecar["heatmap_png"] = heatmap_name;
      log << path.string() << ": " << e.prediction.top1_label << " -> " << overlay_name << '\n';
    } catch (const std::exception& ex) {
      ++failures;
      sidecar["error"] = ex.what();
      log << path.string() << ": error: " << ex.what() << '\n';
    }
    try {
      write_text(out_dir / (stem + ".json"), sidecar.dump(2));
    } catch (const std::exception& ex) {
      ++failures;
      log << path.string() << ": error: " << ex.what() << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_predict(const model::Model& m, const std::vector<fs::path>& images, std::ostream& out) {
  int failures = 0;
  for (const fs::path& path : images) {
    nlohmann::ordered_json j;
    j["source"] = path.string();
    try {
      const RgbImage image = read_image(path);
      const auto p =
          m.predict(imaging::to_model_input(image, m.config().input_size, m.normalization()))
              .at(0);
      j.update(xai::prediction_json(p, m.labels()));
    } catch (const std::exception& ex) {
      ++failures;
      j["error"] = ex.what();
    }
    out << j.dump() << '\n';
  }
  return failures == 0 ? 0 : 1;
}

service::ServiceConfig resolve_serve_config(const ServeFlags& flags,
                                            const service::Getenv& getenv) {
  service::ServiceConfig c = service::config_from_env({}, getenv);
  if (flags.model_path) c.model_path = *flags.model_path;
  if (flags.bind) std::tie(c.host, c.port) = service::parse_bind(*flags.bind);
  if (flags.alpha) c.overlay_alpha = *flags.alpha;
  if (flags.gamma) c.overlay_gamma = *flags.gamma;
  if (flags.max_image_bytes) c.max_image_bytes = *flags.max_image_bytes;
  if (flags.cors_origins) c.cors_origins = *flags.cors_origins;
  if (flags.log_format) {
    if (*flags.log_format == "json") {
      c.log_format = service::LogFormat::kJson;
    } else if (*flags.log_format == "plain") {
      c.log_format = service::LogFormat::kPlain;
    } else {
      throw InvalidArgument("--log must be json or plain");
    }
  }
  if (flags.workers) c.workers = *flags.workers;
  c.validate();
  return c;
}

}  // namespace uxai::cli
