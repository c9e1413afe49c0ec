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
#include <cmath>
#include <fstream>
#include <numeric>

#include "uxai/cli.hpp"
#include "uxai/errors.hpp"

namespace uxai::cli {
namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

bool hidden(const fs::path& p) { return p.filename().string().starts_with("."); }

}  // namespace

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InvalidArgument("cannot read manifest " + manifest.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const fs::path p(line);
    const std::string label = p.parent_path().filename().string();
    if (label.empty()) {
      throw InvalidArgument(manifest.string() + ":" + std::to_string(number) +
                            ": path has no class directory: " + line);
    }
    entries.push_back({line, label});
  }
  return entries;
}

void write_manifest(const fs::path& manifest, const std::vector<std::string>& paths) {
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write manifest " + manifest.string());
  for (const std::string& p : paths) out << p << '\n';
  if (!out) throw InvalidArgument("failed writing manifest " + manifest.string());
}

void SplitSpec::validate() const {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw InvalidArgument("split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");
}

std::array<int, 3> largest_remainder(int n, const std::array<double, 3>& fractions) {
  if (n < 0) throw InvalidArgument("largest_remainder: negative count");
  std::array<int, 3> counts{};
  std::array<double, 3> rest{};
  int assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = n * fractions[i];
    // The guard keeps 0.6 * 10 from flooring to 5.
    counts[i] = static_cast<int>(std::floor(quota + 1e-9));
    rest[i] = quota - counts[i];
    assigned += counts[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rest[a] > rest[b]; });
  for (int k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++counts[order[k]];
  return counts;
}

std::string group_key(const std::string& filename, const std::string& delimiter) {
  const std::string stem = fs::path(filename).stem().string();
  if (delimiter.empty()) return stem;
  const auto at = stem.find(delimiter);
  return at == std::string::npos ? stem : stem.substr(0, at);
}

SplitPlan plan_split(const std::map<std::string, std::vector<std::string>>& files,
                     const SplitSpec& spec) {
  spec.validate();
  SplitPlan plan;
  for (const auto& [label, names] : files) {
    if (names.empty()) throw InvalidArgument("class '" + label + "' has no files");
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());

    // Without a delimiter every file is its own group.
    std::map<std::string, std::vector<std::string>> by_key;
    for (const std::string& name : sorted) {
      by_key[spec.group_delimiter.empty() ? name : group_key(name, spec.group_delimiter)]
          .push_back(name);
    }
    std::vector<const std::vector<std::string>*> groups;
    for (const auto& [key, members] : by_key) groups.push_back(&members);
    // Seeded per class so adding a class leaves the others untouched.
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ull ^ fnv1a(label));
    rng.shuffle(groups.begin(), groups.end());

    const auto target = largest_remainder(static_cast<int>(sorted.size()), spec.fractions);
    std::array<int, 3> count{};
    for (const auto* group : groups) {
      int best = 0;
      for (int p = 1; p < 3; ++p) {
        if (target[p] - count[p] > target[best] - count[best]) best = p;
      }
      count[best] += static_cast<int>(group->size());
      for (const std::string& name : *group) plan.paths[best].push_back(label + "/" + name);
    }
    plan.counts[label] = count;
  }
  for (auto& list : plan.paths) std::sort(list.begin(), list.end());
  return plan;
}

SplitPlan cmd_split(const fs::path& dataset_dir, const fs::path& out_dir, const SplitSpec& spec) {
  if (!fs::is_directory(dataset_dir)) {
    throw InvalidArgument("dataset directory not found: " + dataset_dir.string());
  }
  std::map<std::string, std::vector<std::string>> files;
  for (const auto& cls : fs::directory_iterator(dataset_dir)) {
    if (!cls.is_directory() || hidden(cls.path())) continue;
    auto& names = files[cls.path().filename().string()];
    for (const auto& f : fs::directory_iterator(cls.path())) {
      if (f.is_regular_file() && !hidden(f.path())) names.push_back(f.path().filename().string());
    }
  }
  if (files.empty()) {
    throw InvalidArgument("no class subdirectories in " + dataset_dir.string());
  }
  SplitPlan plan = plan_split(files, spec);
  fs::create_directories(out_dir);
  for (int p = 0; p < 3; ++p) {
    write_manifest(out_dir / (std::string(kPartitionNames[p]) + ".txt"), plan.paths[p]);
  }
  return plan;
}

}  // namespace uxai::cli
