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

// HTTP inference service: GET /health, GET /labels, POST /predict and
// POST /explain. Uploads are validated, decoded and processed in memory;
// nothing is written to disk while handling a request.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uxai/model.hpp"

namespace uxai::service {

enum class LogFormat { kJson, kPlain };

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 picks an ephemeral port
  std::string model_path;
  std::size_t max_image_bytes = 10u << 20;
  double overlay_alpha = 0.45;
  double overlay_gamma = 1.0;
  std::vector<std::string> cors_origins = {"*"};
  LogFormat log_format = LogFormat::kJson;
  int workers = 4;
  std::string device = "cpu";  // reserved; inference always runs on CPU

  void validate() const;
};

// "host:port"; throws InvalidArgument.
std::pair<std::string, int> parse_bind(const std::string& text);

using Getenv = std::function<const char*(const char*)>;

// Overlays UXAI_* environment variables on `base`. Malformed values throw
// InvalidArgument naming the variable.
ServiceConfig config_from_env(ServiceConfig base = {}, const Getenv& getenv = {});

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;
};

struct LogRecord {
  std::string timestamp;  // UTC ISO-8601 with milliseconds
  std::string request_id;
  std::string method;
  std::string route;
  int status = 0;
  double latency_ms = 0.0;
  std::string model_version;

  std::string to_json() const;
  std::string to_plain() const;
};

// Declared content type and payload of an upload, once it passed the MIME,
// size and magic-byte checks.
struct Upload {
  std::string content_type;
  std::string bytes;
};

// Checks on an upload already split out of the request. `declared` is the
// part or body content type, parameters allowed.
std::optional<ApiError> validate_upload(const std::string& declared, const std::string& bytes,
                                        std::size_t max_bytes);

// FNV-1a over the checkpoint bytes, hex.
std::string fingerprint(const std::string& bytes);

class Service {
 public:
  // Loads the checkpoint at config.model_path. A load failure does not
  // throw: the service starts degraded and answers 503.
  explicit Service(ServiceConfig config, std::ostream& log);
  // Serves an in-memory model.
  Service(ServiceConfig config, model::Model model, std::string model_version,
          std::ostream& log);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  bool model_loaded() const;
  const std::string& model_version() const;
  const std::string& load_error() const;
  const ServiceConfig& config() const;

  // Binds the configured address and returns the bound port. Throws
  // InvalidState when the address cannot be bound.
  int bind();
  // Serves on the bound socket until stop(); in-flight requests drain.
  void listen();
  // bind() plus listen() on a background thread.
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uxai::service
