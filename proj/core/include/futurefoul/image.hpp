// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace futurefoul {

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved RGB image (HWC) with channel values in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  float& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  float at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::vector<float>& data() noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3 +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Bilinear resize with half-pixel centres; aspect ratio is not preserved.
/// Throws std::invalid_argument for an empty image or non-positive target.
Image resize_image(const Image& img, int target_width, int target_height);
inline Image resize_image(const Image& img, int target) { return resize_image(img, target, target); }

/// Copy of the pixel rectangle [x0, x1) x [y0, y1).
Image sub_image(const Image& img, int x0, int y0, int x1, int y1);

std::uint8_t to_byte(float v) noexcept;

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);
/// Writes 8-bit RGB rows given as planar CHW bytes.
void write_png_planar(const std::filesystem::path& path, const std::uint8_t* chw, int width, int height);
/// Reads an RGB PNG into planar CHW bytes; the size must match.
std::vector<std::uint8_t> read_png_planar(const std::filesystem::path& path, int width, int height);

// Flat-shaded drawing, clipped to the image.
void fill_rect(Image& img, double x, double y, double w, double h, Rgb color);
void draw_rect(Image& img, double x, double y, double w, double h, Rgb color, int thickness = 1);
void fill_disc(Image& img, double cx, double cy, double radius, Rgb color);
void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb color);

}  // namespace futurefoul
