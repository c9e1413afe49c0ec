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

// Portable checkpoint container.
//
//   offset 0   "MRTN"
//   offset 4   format version (u8, currently 1)
//   offset 5   header length L (u32 little-endian)
//   offset 9   UTF-8 JSON header of L bytes:
//              {version, config, labels, norm_mean, norm_std,
//               blob_manifest: [{name, shape}]}
//   offset 9+L little-endian f32 blobs in manifest order
//   last 8     u64 little-endian count of all bytes before these 8
//
// Every blob of Model::parameters() is stored, including BN running stats.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uxai/model.hpp"

namespace uxai::model {

inline constexpr char kCheckpointMagic[4] = {'M', 'R', 'T', 'N'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Model& model);

// Throws CorruptCheckpoint (with byte offset) for structural damage and
// InvalidArgument for a self-consistent but invalid header.
Model parse_checkpoint(const std::vector<std::uint8_t>& bytes);

// Writes to a sibling temporary file, then renames over `path`.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
// Stores `labels` and `norm` in place of the model's own metadata.
void save_checkpoint(const Model& model, const std::vector<std::string>& labels,
                     const Normalization& norm, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace uxai::model
