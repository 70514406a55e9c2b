// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>

#include "futurefoul/error.hpp"

namespace futurefoul {

Image::Image(int width, int height, float fill)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)) * 3,
            fill) {
  if (width < 0 || height < 0) throw std::invalid_argument("Image: negative size");
}

Image resize_image(const Image& img, int target_width, int target_height) {
  if (img.empty()) throw std::invalid_argument("resize_image: empty image");
  if (target_width <= 0 || target_height <= 0) throw std::invalid_argument("resize_image: bad target size");
  if (img.width() == target_width && img.height() == target_height) return img;

  Image out(target_width, target_height);
  const double sx = static_cast<double>(img.width()) / target_width;
  const double sy = static_cast<double>(img.height()) / target_height;

  // Precompute horizontal taps.
  std::vector<int> x0(static_cast<std::size_t>(target_width));
  std::vector<int> x1(static_cast<std::size_t>(target_width));
  std::vector<float> fx(static_cast<std::size_t>(target_width));
  for (int x = 0; x < target_width; ++x) {
    double src = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width() - 1));
    int lo = static_cast<int>(std::floor(src));
    x0[x] = lo;
    x1[x] = std::min(lo + 1, img.width() - 1);
    fx[x] = static_cast<float>(src - lo);
  }
  for (int y = 0; y < target_height; ++y) {
    double src = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height() - 1));
    const int y0 = static_cast<int>(std::floor(src));
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const auto fy = static_cast<float>(src - y0);
    for (int x = 0; x < target_width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float top = img.at(y0, x0[x], c) + (img.at(y0, x1[x], c) - img.at(y0, x0[x], c)) * fx[x];
        const float bottom = img.at(y1, x0[x], c) + (img.at(y1, x1[x], c) - img.at(y1, x0[x], c)) * fx[x];
        out.at(y, x, c) = std::clamp(top + (bottom - top) * fy, 0.0f, 1.0f);
      }
    }
  }
  return out;
}

Image sub_image(const Image& img, int x0, int y0, int x1, int y1) {
  x0 = std::clamp(x0, 0, img.width());
  x1 = std::clamp(x1, 0, img.width());
  y0 = std::clamp(y0, 0, img.height());
  y1 = std::clamp(y1, 0, img.height());
  Image out(std::max(0, x1 - x0), std::max(0, y1 - y0));
  for (int y = y0; y < y1; ++y) {
    const auto src = img.data().begin() + (static_cast<std::ptrdiff_t>(y) * img.width() + x0) * 3;
    std::copy_n(src, static_cast<std::size_t>(x1 - x0) * 3,
                out.data().begin() + static_cast<std::ptrdiff_t>(y - y0) * out.width() * 3);
  }
  return out;
}

std::uint8_t to_byte(float v) noexcept {
  // Same as lround on the non-negative product; the double sum is exact.
  const double p = static_cast<double>(std::clamp(v, 0.0f, 1.0f) * 255.0f);
  return static_cast<std::uint8_t>(p + 0.5);
}

namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_rgb_bytes(const std::filesystem::path& path, int& width, int& height) {
  PngImage png;
  if (png_image_begin_read_from_file(&png.image, path.c_str()) == 0) {
    throw Error("cannot read PNG " + path.string() + ": " + png.image.message);
  }
  png.image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr) == 0) {
    throw Error("cannot decode PNG " + path.string() + ": " + png.image.message);
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buffer;
}

// Fast deflate and no row filters: synthetic frames are large flat areas
// that compress well anyway, and writing dominates dataset generation.
bool write_rgb_file(std::FILE* fp, const std::uint8_t* hwc, png_uint_32 width, png_uint_32 height,
                    std::string& message) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    message = "out of memory";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    message = "libpng error";
    return false;
  }
  png_init_io(png, fp);
  png_set_compression_level(png, 1);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) png_write_row(png, hwc + static_cast<std::size_t>(y) * width * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_rgb_bytes(const std::filesystem::path& path, const std::uint8_t* hwc, int width, int height) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw Error("cannot write PNG " + path.string());
  std::string message;
  const bool ok = write_rgb_file(fp, hwc, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), message);
  const bool closed = std::fclose(fp) == 0;
  if (!ok || !closed) throw Error("cannot write PNG " + path.string() + ": " + (ok ? "close failed" : message));
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  auto bytes = read_rgb_bytes(path, w, h);
  Image img(w, h);
  auto& data = img.data();
  for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = static_cast<float>(bytes[i]) / 255.0f;
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  std::vector<std::uint8_t> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), to_byte);
  write_rgb_bytes(path, bytes.data(), img.width(), img.height());
}

void write_png_planar(const std::filesystem::path& path, const std::uint8_t* chw, int width, int height) {
  const std::size_t plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> hwc(plane * 3);
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) hwc[p * 3 + c] = chw[c * plane + p];
  }
  write_rgb_bytes(path, hwc.data(), width, height);
}

std::vector<std::uint8_t> read_png_planar(const std::filesystem::path& path, int width, int height) {
  int w = 0;
  int h = 0;
  auto hwc = read_rgb_bytes(path, w, h);
  if (w != width || h != height) {
    throw Error("PNG " + path.string() + " is " + std::to_string(w) + "x" + std::to_string(h) + ", expected " +
                std::to_string(width) + "x" + std::to_string(height));
  }
  const std::size_t plane = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> chw(plane * 3);
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) chw[c * plane + p] = hwc[p * 3 + c];
  }
  return chw;
}

namespace {

void put(Image& img, int x, int y, Rgb color) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<float>(color[static_cast<std::size_t>(c)]) / 255.0f;
}

}  // namespace

void fill_rect(Image& img, double x, double y, double w, double h, Rgb color) {
  const int x0 = std::max(0, static_cast<int>(std::lround(x)));
  const int y0 = std::max(0, static_cast<int>(std::lround(y)));
  const int x1 = std::min(img.width(), static_cast<int>(std::lround(x + w)));
  const int y1 = std::min(img.height(), static_cast<int>(std::lround(y + h)));
  const float rgb[3] = {color[0] / 255.0f, color[1] / 255.0f, color[2] / 255.0f};
  for (int yy = y0; yy < y1; ++yy) {
    float* row = &img.at(yy, 0, 0);
    for (int xx = x0; xx < x1; ++xx) std::copy_n(rgb, 3, row + static_cast<std::size_t>(xx) * 3);
  }
}

void draw_rect(Image& img, double x, double y, double w, double h, Rgb color, int thickness) {
  const int x0 = static_cast<int>(std::lround(x));
  const int y0 = static_cast<int>(std::lround(y));
  const int x1 = static_cast<int>(std::lround(x + w)) - 1;
  const int y1 = static_cast<int>(std::lround(y + h)) - 1;
  for (int t = 0; t < thickness; ++t) {
    for (int xx = x0; xx <= x1; ++xx) {
      put(img, xx, y0 + t, color);
      put(img, xx, y1 - t, color);
    }
    for (int yy = y0; yy <= y1; ++yy) {
      put(img, x0 + t, yy, color);
      put(img, x1 - t, yy, color);
    }
  }
}

void fill_disc(Image& img, double cx, double cy, double radius, Rgb color) {
  const int y0 = static_cast<int>(std::floor(cy - radius));
  const int y1 = static_cast<int>(std::ceil(cy + radius));
  const int x0 = static_cast<int>(std::floor(cx - radius));
  const int x1 = static_cast<int>(std::ceil(cx + radius));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) put(img, x, y, color);
    }
  }
}

void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb color) {
  const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int steps = std::max(1, static_cast<int>(std::ceil(len)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    put(img, static_cast<int>(std::lround(x0 + (x1 - x0) * t)), static_cast<int>(std::lround(y0 + (y1 - y0) * t)),
        color);
  }
}

}  // namespace futurefoul
