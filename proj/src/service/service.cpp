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

#include "uxai/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iterator>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "uxai/checkpoint.hpp"
#include "uxai/colormap.hpp"
#include "uxai/errors.hpp"
#include "uxai/image.hpp"
#include "uxai/xai.hpp"

namespace uxai::service {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kRequestIdHeader = "X-Request-Id";

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Media type without parameters, lower-cased.
std::string media_type(const std::string& header) {
  std::string t = trim(header.substr(0, header.find(';')));
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

bool valid_request_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  });
}

std::string code_for_status(int status) {
  switch (status) {
    case 400: return "bad_request";
    case 404: return "not_found";
    case 405: return "method_not_allowed";
    case 413: return "payload_too_large";
    case 414: return "uri_too_long";
    case 415: return "unsupported_media_type";
    case 503: return "model_unavailable";
    default: return status >= 500 ? "internal_error" : "request_error";
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  T value{};
  try {
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(text, &used));
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
      value = static_cast<T>(std::stoull(text, &used));
    } else {
      const long long v = std::stoll(text, &used);
      if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) {
        throw std::out_of_range(text);
      }
      value = static_cast<T>(v);
    }
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": '" + text + "' is not a valid number");
  }
  if (used != text.size()) throw InvalidArgument(what + ": '" + text + "' is not a valid number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw InvalidArgument(what + " must be finite");
  }
  return value;
}

class RequestFailure : public std::runtime_error {
 public:
  explicit RequestFailure(ApiError e) : std::runtime_error(e.message), error(std::move(e)) {}
  ApiError error;
};

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ServiceConfig::validate() const {
  if (host.empty()) throw InvalidArgument("bind host is empty");
  if (port < 0 || port > 65535) throw InvalidArgument("port must be in [0, 65535]");
  if (max_image_bytes == 0) throw InvalidArgument("max image bytes must be > 0");
  if (!(overlay_alpha >= 0.0 && overlay_alpha <= 1.0)) {
    throw InvalidArgument("overlay alpha must be in [0, 1]");
  }
  if (!(overlay_gamma > 0.0) || !std::isfinite(overlay_gamma)) {
    throw InvalidArgument("overlay gamma must be positive");
  }
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
}

std::pair<std::string, int> parse_bind(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw InvalidArgument("bind address '" + text + "' is not host:port");
  }
  std::string host = text.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  const int port = parse_number<int>(text.substr(colon + 1), "bind port");
  if (port < 0 || port > 65535) throw InvalidArgument("bind port outside [0, 65535]");
  return {host, port};
}

ServiceConfig config_from_env(ServiceConfig base, const Getenv& getenv) {
  const Getenv get = getenv ? getenv : [](const char* name) { return std::getenv(name); };
  auto var = [&](const char* name) -> std::optional<std::string> {
    const char* v = get(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = var("UXAI_MODEL_PATH")) base.model_path = *v;
  if (auto v = var("UXAI_BIND")) std::tie(base.host, base.port) = parse_bind(*v);
  if (auto v = var("UXAI_MAX_IMAGE_BYTES")) {
    base.max_image_bytes = parse_number<std::size_t>(*v, "UXAI_MAX_IMAGE_BYTES");
  }
  if (auto v = var("UXAI_OVERLAY_ALPHA")) {
    base.overlay_alpha = parse_number<double>(*v, "UXAI_OVERLAY_ALPHA");
  }
  if (auto v = var("UXAI_OVERLAY_GAMMA")) {
    base.overlay_gamma = parse_number<double>(*v, "UXAI_OVERLAY_GAMMA");
  }
  if (auto v = var("UXAI_CORS_ORIGINS")) base.cors_origins = split_list(*v);
  if (auto v = var("UXAI_LOG")) {
    if (*v == "json") {
      base.log_format = LogFormat::kJson;
    } else if (*v == "plain") {
      base.log_format = LogFormat::kPlain;
    } else {
      throw InvalidArgument("UXAI_LOG must be json or plain, got '" + *v + "'");
    }
  }
  if (auto v = var("UXAI_WORKERS")) base.workers = parse_number<int>(*v, "UXAI_WORKERS");
  if (auto v = var("UXAI_DEVICE")) base.device = *v;
  base.validate();
  return base;
}

std::string LogRecord::to_json() const {
  Json j;
  j["timestamp"] = timestamp;
  j["request_id"] = request_id;
  j["method"] = method;
  j["route"] = route;
  j["status"] = status;
  j["latency_ms"] = std::round(latency_ms * 1000.0) / 1000.0;
  j["model_version"] = model_version;
  return j.dump();
}

std::string LogRecord::to_plain() const {
  char latency[32];
  std::snprintf(latency, sizeof latency, "%.3f", latency_ms);
  return timestamp + " " + request_id + " " + method + " " + route + " " +
         std::to_string(status) + " " + latency + "ms model=" + model_version;
}

std::optional<ApiError> validate_upload(const std::string& declared, const std::string& bytes,
                                        std::size_t max_bytes) {
  const std::string type = media_type(declared);
  if (type != "image/png" && type != "image/jpeg") {
    return ApiError{415, "unsupported_media_type",
                    "content type '" + type + "' is not accepted; use image/png or image/jpeg"};
  }
  if (bytes.size() > max_bytes) {
    return ApiError{413, "payload_too_large",
                    "upload of " + std::to_string(bytes.size()) + " bytes exceeds the limit of " +
                        std::to_string(max_bytes)};
  }
  if (bytes.empty()) return ApiError{400, "empty_upload", "the uploaded file is empty"};
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const imaging::ImageFormat actual = imaging::sniff_format({data, bytes.size()});
  const imaging::ImageFormat expected =
      type == "image/png" ? imaging::ImageFormat::kPng : imaging::ImageFormat::kJpeg;
  if (actual != expected) {
    return ApiError{415, "content_type_mismatch",
                    "declared " + type + " but the bytes are " + imaging::to_string(actual)};
  }
  return std::nullopt;
}

std::string fingerprint(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Service

struct Service::Impl {
  ServiceConfig config;
  std::ostream& log;
  std::mutex log_mutex;
  std::optional<model::Model> model;
  std::string model_version = "none";
  std::string load_error;
  Clock::time_point started = Clock::now();
  std::string id_prefix;
  std::atomic<std::uint64_t> id_counter{0};
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  Impl(ServiceConfig cfg, std::ostream& out) : config(std::move(cfg)), log(out) {
    config.validate();
    std::random_device rd;
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", rd());
    id_prefix = buf;
    routes();
  }

  void load(const std::string& path) {
    if (path.empty()) {
      load_error = "no model path configured";
      return;
    }
    try {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw InvalidArgument("cannot open " + path);
      const std::string bytes{std::istreambuf_iterator<char>(in), {}};
      model = model::parse_checkpoint({bytes.begin(), bytes.end()});
      model_version = fingerprint(bytes);
    } catch (const std::exception& e) {
      model.reset();
      load_error = e.what();
    }
  }

  std::string next_request_id() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%08llx", id_prefix.c_str(),
                  static_cast<unsigned long long>(++id_counter));
    return buf;
  }

  // ----- plumbing shared by every route -----

  static thread_local std::optional<Clock::time_point> request_start;

  std::string request_id_of(const httplib::Request& req, httplib::Response& res) {
    if (res.has_header(kRequestIdHeader)) return res.get_header_value(kRequestIdHeader);
    const std::string incoming = req.get_header_value(kRequestIdHeader);
    const std::string id = valid_request_id(incoming) ? incoming : next_request_id();
    res.set_header(kRequestIdHeader, id);
    return id;
  }

  void apply_cors(const httplib::Request& req, httplib::Response& res) const {
    const auto& allowed = config.cors_origins;
    if (std::find(allowed.begin(), allowed.end(), "*") != allowed.end()) {
      res.set_header("Access-Control-Allow-Origin", "*");
      return;
    }
    const std::string origin = req.get_header_value("Origin");
    if (!origin.empty() && std::find(allowed.begin(), allowed.end(), origin) != allowed.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  }

  void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }

  void send_error(const httplib::Request& req, httplib::Response& res, const ApiError& e) {
    Json body;
    body["error"] = {{"code", e.code}, {"message", e.message},
                     {"request_id", request_id_of(req, res)}};
    send_json(res, e.status, body);
  }

  void write_log(const httplib::Request& req, const httplib::Response& res) {
    LogRecord r;
    r.timestamp = utc_timestamp();
    r.request_id = res.get_header_value(kRequestIdHeader);
    r.method = req.method;
    r.route = req.path;
    r.status = res.status;
    r.latency_ms = request_start ? ms_since(*request_start) : 0.0;
    r.model_version = model_version;
    request_start.reset();
    const std::string line = config.log_format == LogFormat::kJson ? r.to_json() : r.to_plain();
    std::lock_guard<std::mutex> lock(log_mutex);
    log << line << '\n';
    log.flush();
  }

  // Runs a handler, mapping library exceptions to the error envelope.
  template <typename F>
  void guarded(const httplib::Request& req, httplib::Response& res, F&& body) {
    request_id_of(req, res);
    try {
      body();
    } catch (const RequestFailure& f) {
      send_error(req, res, f.error);
    } catch (const std::exception& e) {
      send_error(req, res, {500, "internal_error", e.what()});
    }
  }

  const model::Model& require_model() const {
    if (!model) {
      throw RequestFailure({503, "model_unavailable", "model not loaded: " + load_error});
    }
    return *model;
  }

  // ----- request parsing -----

  Upload read_upload(const httplib::Request& req) const {
    Upload up;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        throw RequestFailure({400, "missing_file", "multipart field 'file' is required"});
      }
      const httplib::MultipartFormData part = req.get_file_value("file");
      up.content_type = part.content_type;
      up.bytes = part.content;
    } else {
      up.content_type = req.get_header_value("Content-Type");
      up.bytes = req.body;
    }
    if (auto e = validate_upload(up.content_type, up.bytes, config.max_image_bytes)) {
      throw RequestFailure(*e);
    }
    return up;
  }

  static imaging::RgbImage decode(const Upload& up) {
    try {
      const auto* data = reinterpret_cast<const std::uint8_t*>(up.bytes.data());
      return imaging::decode_image({data, up.bytes.size()});
    } catch (const std::exception& e) {
      throw RequestFailure({422, "undecodable_image", e.what()});
    }
  }

  // Query string first, then non-file multipart fields.
  static std::optional<std::string> param(const httplib::Request& req, const std::string& name) {
    if (req.has_param(name)) return req.get_param_value(name);
    if (req.is_multipart_form_data() && req.has_file(name)) {
      const auto field = req.get_file_value(name);
      if (field.filename.empty()) return field.content;
    }
    return std::nullopt;
  }

  template <typename T>
  static std::optional<T> numeric_param(const httplib::Request& req, const std::string& name) {
    const auto text = param(req, name);
    if (!text) return std::nullopt;
    try {
      return parse_number<T>(*text, name);
    } catch (const InvalidArgument& e) {
      throw RequestFailure({400, "invalid_parameter", e.what()});
    }
  }

  Json prediction_block(const model::PredictionResult& p, const model::Model& m,
                        double inference_ms) const {
    Json j = xai::prediction_json(p, m.labels());
    j["inference_ms"] = inference_ms;
    j["model_version"] = model_version;
    return j;
  }

  // ----- routes -----

  void handle_health(const httplib::Request&, httplib::Response& res) {
    Json j;
    j["status"] = model ? "ok" : "degraded";
    j["model_loaded"] = model.has_value();
    j["model_version"] = model_version;
    j["uptime_s"] = std::chrono::duration<double>(Clock::now() - started).count();
    if (!model) j["reason"] = load_error;
    send_json(res, model ? 200 : 503, j);
  }

  void handle_labels(const httplib::Request&, httplib::Response& res) {
    const model::Model& m = require_model();
    Json j;
    j["labels"] = m.labels();
    send_json(res, 200, j);
  }

  void handle_predict(const httplib::Request& req, httplib::Response& res) {
    const model::Model& m = require_model();
    const Upload up = read_upload(req);
    const auto start = Clock::now();
    const imaging::RgbImage image = decode(up);
    const tensor::Tensor input =
        imaging::to_model_input(image, m.config().input_size, m.normalization());
    const model::PredictionResult p = m.predict(input).at(0);
    send_json(res, 200, prediction_block(p, m, ms_since(start)));
  }

  xai::ExplainParams explain_params(const httplib::Request& req, const model::Model& m) const {
    xai::ExplainParams p;
    try {
      p.method = xai::method_from_string(param(req, "method").value_or("gradcam"));
    } catch (const InvalidArgument& e) {
      throw RequestFailure({400, "unknown_method", e.what()});
    }
    if (auto v = numeric_param<int>(req, "target_class")) {
      if (*v < 0 || *v >= m.config().num_classes) {
        throw RequestFailure({400, "invalid_target_class",
                              "target_class must be in [0, " +
                                  std::to_string(m.config().num_classes) + ")"});
      }
      p.target_class = *v;
    }
    if (auto v = numeric_param<std::uint64_t>(req, "seed")) p.seed = *v;
    if (auto v = numeric_param<int>(req, "num_samples")) p.lime.num_samples = *v;
    if (auto v = numeric_param<double>(req, "kernel_width")) p.lime.kernel_width = *v;
    if (auto v = numeric_param<double>(req, "ridge_lambda")) p.lime.ridge_lambda = *v;
    if (auto v = numeric_param<int>(req, "superpixel_k")) {
      p.lime.superpixel_k = *v;
      p.shap.superpixel_k = *v;
    }
    if (auto v = numeric_param<int>(req, "max_evals")) p.shap.max_evals = *v;
    if (auto v = param(req, "masker")) {
      try {
        p.shap.masker = xai::masker_from_string(*v);
      } catch (const InvalidArgument& e) {
        throw RequestFailure({400, "invalid_parameter", e.what()});
      }
    }
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw RequestFailure({400, "invalid_parameter", e.what()});
    }
    return p;
  }

  void handle_explain(const httplib::Request& req, httplib::Response& res) {
    const model::Model& m = require_model();
    const Upload up = read_upload(req);
    const xai::ExplainParams params = explain_params(req, m);
    imaging::OverlayParams overlay{config.overlay_alpha, config.overlay_gamma};
    if (auto v = numeric_param<double>(req, "alpha")) overlay.global_alpha = *v;
    if (auto v = numeric_param<double>(req, "gamma")) overlay.gamma = *v;
    if (!(overlay.global_alpha >= 0.0 && overlay.global_alpha <= 1.0)) {
      throw RequestFailure({400, "invalid_parameter", "alpha must be in [0, 1]"});
    }
    if (!(overlay.gamma > 0.0)) {
      throw RequestFailure({400, "invalid_parameter", "gamma must be positive"});
    }

    const auto start = Clock::now();
    const imaging::RgbImage image = decode(up);
    const xai::Explanation e = xai::explain(m, image, params);
    const xai::RenderedExplanation rendered = xai::render_explanation(image, e.heatmap, overlay);
    const double explain_ms = ms_since(start);

    Json j = prediction_block(e.prediction, m, explain_ms);
    j.erase("inference_ms");
    j["method"] = xai::to_string(params.method);
    j["target_class"] = e.target_class;
    j["overlay_png_base64"] = imaging::encode_png_base64(rendered.overlay).base64;
    j["heatmap_png_base64"] = imaging::encode_png_base64(rendered.heatmap).base64;
    Json used = xai::params_json(params, overlay);
    used["model_evaluations"] = e.evaluations;
    j["params_used"] = used;
    j["explain_ms"] = explain_ms;
    send_json(res, 200, j);
  }

  void routes() {
    server.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
      request_start = Clock::now();
      return httplib::Server::HandlerResponse::Unhandled;
    });
    // Every response, including ones httplib produces itself, gets the
    // request id, CORS headers and the JSON error envelope.
    server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      send_error(req, res, {res.status, code_for_status(res.status),
                            httplib::status_message(res.status)});
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      request_id_of(req, res);
      apply_cors(req, res);
    });
    server.set_logger(
        [this](const httplib::Request& req, const httplib::Response& res) { write_log(req, res); });
    server.set_payload_max_length(config.max_image_bytes * 2 + (1u << 20));
    // The library default adds SO_REUSEPORT, which lets a second instance
    // silently share the port instead of failing to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });

    server.Get("/health", [this](const auto& req, auto& res) {
      guarded(req, res, [&] { handle_health(req, res); });
    });
    server.Get("/labels", [this](const auto& req, auto& res) {
      guarded(req, res, [&] { handle_labels(req, res); });
    });
    server.Post("/predict", [this](const auto& req, auto& res) {
      guarded(req, res, [&] { handle_predict(req, res); });
    });
    server.Post("/explain", [this](const auto& req, auto& res) {
      guarded(req, res, [&] { handle_explain(req, res); });
    });
    // Preflight never touches the model.
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Request-Id");
      res.set_header("Access-Control-Max-Age", "600");
    });
    server.new_task_queue = [this] {
      return new httplib::ThreadPool(static_cast<std::size_t>(config.workers));
    };
  }
};

thread_local std::optional<Clock::time_point> Service::Impl::request_start;

Service::Service(ServiceConfig config, std::ostream& log)
    : impl_(std::make_unique<Impl>(std::move(config), log)) {
  impl_->load(impl_->config.model_path);
}

Service::Service(ServiceConfig config, model::Model model, std::string model_version,
                 std::ostream& log)
    : impl_(std::make_unique<Impl>(std::move(config), log)) {
  impl_->model = std::move(model);
  impl_->model_version = std::move(model_version);
}

Service::~Service() { stop(); }

bool Service::model_loaded() const { return impl_->model.has_value(); }
const std::string& Service::model_version() const { return impl_->model_version; }
const std::string& Service::load_error() const { return impl_->load_error; }
const ServiceConfig& Service::config() const { return impl_->config; }

int Service::bind() {
  const ServiceConfig& c = impl_->config;
  int port = c.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(c.host);
  } else if (!impl_->server.bind_to_port(c.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw InvalidState("cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  impl_->bound = true;
  return port;
}

void Service::listen() {
  if (!impl_->bound) throw InvalidState("listen() before bind()");
  impl_->server.listen_after_bind();
}

int Service::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace uxai::service
