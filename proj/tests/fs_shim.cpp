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

#include "fs_shim.hpp"

#include <dlfcn.h>
#include <fcntl.h>
#include <stdarg.h>
#include <stdio.h>
#include <sys/stat.h>

#include <atomic>
#include <cstring>
#include <mutex>

namespace uxai::testing::fs_shim {
namespace {

std::atomic<bool> watching{false};
std::mutex mu;
std::vector<std::string>* hits = new std::vector<std::string>;  // never freed

void record(const char* what, const char* path) {
  if (!watching.load()) return;
  std::lock_guard<std::mutex> lock(mu);
  hits->push_back(std::string(what) + " " + (path ? path : "?"));
}

bool writes(int flags) {
  return (flags & (O_WRONLY | O_RDWR | O_CREAT | O_TRUNC | O_APPEND)) != 0;
}

bool writes(const char* mode) {
  return mode && (std::strchr(mode, 'w') || std::strchr(mode, 'a') || std::strchr(mode, '+'));
}

template <typename Fn>
Fn next(const char* name) {
  return reinterpret_cast<Fn>(dlsym(RTLD_NEXT, name));
}

}  // namespace

void begin_watch() {
  std::lock_guard<std::mutex> lock(mu);
  hits->clear();
  watching = true;
}

std::vector<std::string> end_watch() {
  watching = false;
  std::lock_guard<std::mutex> lock(mu);
  return *hits;
}

}  // namespace uxai::testing::fs_shim

using uxai::testing::fs_shim::next;
using uxai::testing::fs_shim::record;
using uxai::testing::fs_shim::writes;

#define UXAI_MODE_ARG(flags)            \
  mode_t mode = 0;                      \
  if ((flags) & (O_CREAT | O_TMPFILE)) { \
    va_list ap;                         \
    va_start(ap, flags);                \
    mode = va_arg(ap, mode_t);          \
    va_end(ap);                         \
  }

extern "C" {

int open(const char* path, int flags, ...) {
  UXAI_MODE_ARG(flags)
  if (writes(flags)) record("open", path);
  static auto real = next<int (*)(const char*, int, ...)>("open");
  return real(path, flags, mode);
}

int open64(const char* path, int flags, ...) {
  UXAI_MODE_ARG(flags)
  if (writes(flags)) record("open64", path);
  static auto real = next<int (*)(const char*, int, ...)>("open64");
  return real(path, flags, mode);
}

int openat(int dir, const char* path, int flags, ...) {
  UXAI_MODE_ARG(flags)
  if (writes(flags)) record("openat", path);
  static auto real = next<int (*)(int, const char*, int, ...)>("openat");
  return real(dir, path, flags, mode);
}

int openat64(int dir, const char* path, int flags, ...) {
  UXAI_MODE_ARG(flags)
  if (writes(flags)) record("openat64", path);
  static auto real = next<int (*)(int, const char*, int, ...)>("openat64");
  return real(dir, path, flags, mode);
}

int creat(const char* path, mode_t mode) {
  record("creat", path);
  static auto real = next<int (*)(const char*, mode_t)>("creat");
  return real(path, mode);
}

int creat64(const char* path, mode_t mode) {
  record("creat64", path);
  static auto real = next<int (*)(const char*, mode_t)>("creat64");
  return real(path, mode);
}

FILE* fopen(const char* path, const char* mode) {
  if (writes(mode)) record("fopen", path);
  static auto real = next<FILE* (*)(const char*, const char*)>("fopen");
  return real(path, mode);
}

FILE* fopen64(const char* path, const char* mode) {
  if (writes(mode)) record("fopen64", path);
  static auto real = next<FILE* (*)(const char*, const char*)>("fopen64");
  return real(path, mode);
}

FILE* freopen(const char* path, const char* mode, FILE* stream) {
  if (writes(mode)) record("freopen", path);
  static auto real = next<FILE* (*)(const char*, const char*, FILE*)>("freopen");
  return real(path, mode, stream);
}

int rename(const char* from, const char* to) {
  record("rename", to);
  static auto real = next<int (*)(const char*, const char*)>("rename");
  return real(from, to);
}

int unlink(const char* path) {
  record("unlink", path);
  static auto real = next<int (*)(const char*)>("unlink");
  return real(path);
}

int unlinkat(int dirfd, const char* path, int flags) {
  record("unlinkat", path);
  static auto real = next<int (*)(int, const char*, int)>("unlinkat");
  return real(dirfd, path, flags);
}

int remove(const char* path) {
  record("remove", path);
  static auto real = next<int (*)(const char*)>("remove");
  return real(path);
}

int renameat(int from_dir, const char* from, int to_dir, const char* to) {
  record("renameat", to);
  static auto real = next<int (*)(int, const char*, int, const char*)>("renameat");
  return real(from_dir, from, to_dir, to);
}

int mkdir(const char* path, mode_t mode) {
  record("mkdir", path);
  static auto real = next<int (*)(const char*, mode_t)>("mkdir");
  return real(path, mode);
}

int mkstemp(char* tmpl) {
  record("mkstemp", tmpl);
  static auto real = next<int (*)(char*)>("mkstemp");
  return real(tmpl);
}

}  // extern "C"
