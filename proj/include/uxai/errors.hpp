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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uxai {

// Bad caller input: shapes, ranges, inconsistent configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was invoked on an object that lacks required state, e.g. a
// backward pass without cached forward values.
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical failure (singular system, NaN loss).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Image bytes could not be decoded.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptCheckpoint : public std::runtime_error {
 public:
  CorruptCheckpoint(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " +
                           std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace uxai
