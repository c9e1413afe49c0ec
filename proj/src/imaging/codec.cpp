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

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "uxai/errors.hpp"
#include "uxai/image.hpp"

namespace uxai::imaging {
namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

// Refuse absurd headers before allocating.
constexpr long kMaxPixels = 1L << 28;

void check_size(long w, long h) {
  if (w <= 0 || h <= 0) throw InvalidArgument("image has zero dimension");
  if (w * h > kMaxPixels) throw DecodeError("image dimensions too large");
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw DecodeError(std::string("PNG: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  try {
    check_size(img.width, img.height);
  } catch (...) {
    png_image_free(&img);
    throw;
  }
  RgbImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  // Alpha is composited over black.
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&img, &background, out.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw DecodeError("PNG: " + msg);
  }
  return out;
}

std::vector<std::uint8_t> write_png(int width, int height, std::uint32_t format,
                                    const std::uint8_t* pixels) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw InvalidArgument(std::string("PNG encode: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw InvalidArgument(std::string("PNG encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegError*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr, int) {}

RgbImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct info;
  JpegError err;
  info.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  err.mgr.emit_message = jpeg_silence;
  err.message[0] = '\0';
  // Everything touched after a longjmp lives outside this frame's locals.
  auto* out = new RgbImage();
  auto* row = new std::vector<std::uint8_t>();

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&info);
    delete out;
    delete row;
    throw DecodeError(std::string("JPEG: ") + err.message);
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&info, TRUE);
  if (info.jpeg_color_space == JCS_CMYK || info.jpeg_color_space == JCS_YCCK) {
    std::strcpy(err.message, "CMYK JPEG is not supported");
    std::longjmp(err.jump, 1);
  }
  info.out_color_space = info.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&info);
  const long w = info.output_width;
  const long h = info.output_height;
  if (w <= 0 || h <= 0 || w * h > kMaxPixels) {
    std::strcpy(err.message, "bad JPEG dimensions");
    std::longjmp(err.jump, 1);
  }
  const int comps = info.output_components;
  out->width = static_cast<int>(w);
  out->height = static_cast<int>(h);
  out->pixels.resize(static_cast<std::size_t>(w) * h * 3);
  row->resize(static_cast<std::size_t>(w) * comps);
  while (info.output_scanline < info.output_height) {
    JSAMPROW ptr = row->data();
    const auto y = static_cast<std::size_t>(info.output_scanline);
    jpeg_read_scanlines(&info, &ptr, 1);
    std::uint8_t* dst = out->pixels.data() + y * w * 3;
    for (long x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) dst[x * 3 + c] = (*row)[x * comps + (comps == 1 ? 0 : c)];
    }
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  RgbImage result = std::move(*out);
  delete out;
  delete row;
  return result;
}

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

ImageFormat sniff_format(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return ImageFormat::kPng;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return ImageFormat::kJpeg;
  }
  return ImageFormat::kUnknown;
}

std::string to_string(ImageFormat format) {
  switch (format) {
    case ImageFormat::kPng:
      return "png";
    case ImageFormat::kJpeg:
      return "jpeg";
    case ImageFormat::kUnknown:
      break;
  }
  return "unknown";
}

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
  switch (sniff_format(bytes)) {
    case ImageFormat::kPng:
      return decode_png(bytes);
    case ImageFormat::kJpeg:
      return decode_jpeg(bytes);
    case ImageFormat::kUnknown:
      break;
  }
  throw DecodeError("unrecognized image format (expected PNG or JPEG)");
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return write_png(image.width, image.height, PNG_FORMAT_RGB, image.pixels.data());
}

std::vector<std::uint8_t> encode_png(const RgbaImage& image) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * 4) {
    throw InvalidArgument("RGBA image byte count does not match dimensions");
  }
  return write_png(image.width, image.height, PNG_FORMAT_RGBA, image.pixels.data());
}

std::vector<std::uint8_t> encode_jpeg(const RgbImage& image, int quality, bool progressive) {
  jpeg_compress_struct info;
  JpegError err;
  info.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&info);
    std::free(buffer);
    throw InvalidArgument(std::string("JPEG encode: ") + err.message);
  }
  jpeg_create_compress(&info);
  jpeg_mem_dest(&info, &buffer, &size);
  info.image_width = static_cast<JDIMENSION>(image.width);
  info.image_height = static_cast<JDIMENSION>(image.height);
  info.input_components = 3;
  info.in_color_space = JCS_RGB;
  jpeg_set_defaults(&info);
  jpeg_set_quality(&info, quality, TRUE);
  if (progressive) jpeg_simple_progression(&info);
  jpeg_start_compress(&info, TRUE);
  while (info.next_scanline < info.image_height) {
    auto* row = const_cast<JSAMPLE*>(image.pixels.data() +
                                     static_cast<std::size_t>(info.next_scanline) *
                                         image.width * 3);
    jpeg_write_scanlines(&info, &row, 1);
  }
  jpeg_finish_compress(&info);
  jpeg_destroy_compress(&info);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw InvalidArgument("base64 length " + std::to_string(text.size()) +
                          " is not a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int d;
      if (c == '=' && last && k >= 2) {
        ++pad;
        d = 0;
      } else {
        d = pad > 0 ? -1 : base64_value(c);
      }
      if (d < 0) {
        throw InvalidArgument("invalid base64 character at position " +
                              std::to_string(i + k));
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

PngBase64 encode_png_base64(const RgbImage& image) {
  PngBase64 r;
  r.png = encode_png(image);
  r.base64 = base64_encode(r.png);
  return r;
}

PngBase64 encode_png_base64(const RgbaImage& image) {
  PngBase64 r;
  r.png = encode_png(image);
  r.base64 = base64_encode(r.png);
  return r;
}

}  // namespace uxai::imaging
