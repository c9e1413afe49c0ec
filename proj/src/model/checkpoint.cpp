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

#include "uxai/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "uxai/errors.hpp"

namespace uxai::model {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are copied in host byte order");

using json = nlohmann::json;
constexpr std::size_t kPrefix = 9;
constexpr std::size_t kTrailer = 8;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t at) {
  T value;
  std::memcpy(&value, in.data() + at, sizeof(T));
  return value;
}

json shape_json(const tensor::Shape& s) { return json::array({s.n, s.c, s.h, s.w}); }

json norm_json(const std::array<float, 3>& v) {
  return json::array({static_cast<double>(v[0]), static_cast<double>(v[1]),
                      static_cast<double>(v[2])});
}

std::array<float, 3> read_norm(const json& header, const char* key,
                               const std::array<float, 3>& fallback) {
  if (!header.contains(key)) return fallback;
  const json& v = header.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw InvalidArgument(std::string("checkpoint field '") + key +
                          "' must hold 3 numbers");
  }
  std::array<float, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) {
      throw InvalidArgument(std::string("checkpoint field '") + key +
                            "' must hold 3 numbers");
    }
    out[i] = static_cast<float>(v[i].get<double>());
  }
  return out;
}

std::vector<std::uint8_t> encode(const Model& model, const std::vector<std::string>& labels,
                                 const Normalization& norm) {
  if (labels.size() != static_cast<std::size_t>(model.config().num_classes)) {
    throw InvalidArgument("label count " + std::to_string(labels.size()) +
                          " != num_classes " +
                          std::to_string(model.config().num_classes));
  }
  const std::vector<ConstParamRef> params = model.parameters();
  json manifest = json::array();
  for (const ConstParamRef& p : params) {
    manifest.push_back({{"name", p.name}, {"shape", shape_json(p.shape)}});
  }
  const json header = {{"version", kCheckpointVersion},
                       {"config", model.config().to_json()},
                       {"labels", labels},
                       {"norm_mean", norm_json(norm.mean)},
                       {"norm_std", norm_json(norm.stddev)},
                       {"blob_manifest", manifest}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  out.push_back(kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const ConstParamRef& p : params) {
    const auto* raw = reinterpret_cast<const std::uint8_t*>(p.values.data());
    out.insert(out.end(), raw, raw + p.values.size_bytes());
  }
  put<std::uint64_t>(out, static_cast<std::uint64_t>(out.size()));
  return out;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Model& model) {
  return encode(model, model.labels(), model.normalization());
}

Model parse_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kPrefix + kTrailer) {
    throw CorruptCheckpoint("checkpoint too short (" + std::to_string(bytes.size()) +
                                " bytes)",
                            bytes.size());
  }
  if (std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw CorruptCheckpoint("bad checkpoint magic", 0);
  }
  if (bytes[4] != kCheckpointVersion) {
    throw CorruptCheckpoint("unsupported checkpoint version " + std::to_string(bytes[4]), 4);
  }
  const std::size_t payload = bytes.size() - kTrailer;
  const auto recorded = get<std::uint64_t>(bytes, payload);
  if (recorded != payload) {
    throw CorruptCheckpoint("length trailer says " + std::to_string(recorded) +
                                " bytes but " + std::to_string(payload) + " precede it",
                            payload);
  }
  const std::size_t header_len = get<std::uint32_t>(bytes, 5);
  if (header_len > payload - kPrefix) {
    throw CorruptCheckpoint("header length " + std::to_string(header_len) +
                                " exceeds file",
                            5);
  }

  json header;
  try {
    header = json::parse(bytes.begin() + kPrefix, bytes.begin() + kPrefix + header_len);
  } catch (const json::parse_error& e) {
    throw CorruptCheckpoint(std::string("header is not valid JSON: ") + e.what(),
                            kPrefix + e.byte);
  }
  if (!header.is_object() || !header.contains("config") ||
      !header.contains("blob_manifest") || !header["blob_manifest"].is_array()) {
    throw CorruptCheckpoint("header lacks config or blob_manifest", kPrefix);
  }
  if (header.value("version", -1) != kCheckpointVersion) {
    throw CorruptCheckpoint("header version disagrees with prefix", kPrefix);
  }

  Model model = Model::build(ArchitectureConfig::from_json(header["config"]), 0);
  if (header.contains("labels")) {
    std::vector<std::string> labels;
    try {
      labels = header["labels"].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw InvalidArgument("checkpoint field 'labels' must be a list of strings");
    }
    model.set_labels(std::move(labels));
  }
  Normalization norm;
  norm.mean = read_norm(header, "norm_mean", norm.mean);
  norm.stddev = read_norm(header, "norm_std", norm.stddev);
  model.set_normalization(norm);

  const json& manifest = header["blob_manifest"];
  std::vector<ParamRef> params = model.parameters();
  if (manifest.size() != params.size()) {
    throw CorruptCheckpoint("manifest lists " + std::to_string(manifest.size()) +
                                " blobs, config implies " + std::to_string(params.size()),
                            kPrefix);
  }
  std::size_t at = kPrefix + header_len;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& entry = manifest[i];
    if (!entry.is_object() || entry.value("name", std::string()) != params[i].name ||
        entry.value("shape", json()) != shape_json(params[i].shape)) {
      throw CorruptCheckpoint("manifest entry " + std::to_string(i) + " does not match " +
                                  params[i].name + " " + params[i].shape.to_string(),
                              kPrefix);
    }
    const std::size_t n = params[i].values.size_bytes();
    if (at + n > payload) {
      throw CorruptCheckpoint("blob " + params[i].name + " truncated", at);
    }
    std::memcpy(params[i].values.data(), bytes.data() + at, n);
    at += n;
  }
  if (at != payload) {
    throw CorruptCheckpoint(std::to_string(payload - at) + " unexpected bytes after blobs", at);
  }
  return model;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  save_checkpoint(model, model.labels(), model.normalization(), path);
}

void save_checkpoint(const Model& model, const std::vector<std::string>& labels,
                     const Normalization& norm, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode(model, labels, norm);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace uxai::model
