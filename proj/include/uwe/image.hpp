#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uwe/error.hpp"

namespace uwe {

/// Number of representable 8-bit intensity levels.
inline constexpr int kLevels = 256;

/// 8-bit RGB raster, row-major (r,g,b) triples.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height bytes

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> intensities;  // width * height bytes

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

bool operator==(const RgbImage& a, const RgbImage& b);
bool operator==(const GrayImage& a, const GrayImage& b);

/// Rounds half away from zero. Every real -> 8-bit conversion in the
/// pipeline goes through this so all modules agree on ties.
std::uint8_t quantize_byte(double v);

/// BT.601 luma decoloring: round(0.299 r + 0.587 g + 0.114 b).
GrayImage to_grayscale(const RgbImage& img);

/// Intensities scaled to [0,1] as 64-bit floats, row-major.
std::vector<double> normalize(const GrayImage& img);

/// Inverse of normalize for a 3-plane tensor laid out [channel][y][x].
/// Values are clamped to [0,1] before quantization.
/// Throws NonFiniteValue on NaN or infinity.
RgbImage denormalize(std::span<const double> planes, int width, int height);

struct PaddedImage {
  GrayImage image;
  int original_width = 0;
  int original_height = 0;
};

/// Rounds dimensions up to the next multiple, filling new pixels by mirror
/// reflection about the border (edge pixel not repeated). Throws
/// ImageTooSmall when a dimension of 1 needs padding: there is nothing to
/// reflect.
PaddedImage pad_reflect(const GrayImage& img, int multiple);

/// Top-left crop; companion of pad_reflect.
GrayImage crop(const GrayImage& img, int width, int height);
RgbImage crop(const RgbImage& img, int width, int height);

}  // namespace uwe
