#include "uwe/image.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace uwe {

bool operator==(const RgbImage& a, const RgbImage& b) {
  return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
}

bool operator==(const GrayImage& a, const GrayImage& b) {
  return a.width == b.width && a.height == b.height &&
         a.intensities == b.intensities;
}

std::uint8_t quantize_byte(double v) {
  // lround ties away from zero; input is pre-clamped by callers where needed.
  long r = std::lround(v);
  if (r < 0) r = 0;
  if (r > 255) r = 255;
  return static_cast<std::uint8_t>(r);
}

GrayImage to_grayscale(const RgbImage& img) {
  assert(img.pixels.size() == 3 * img.pixel_count());
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.intensities.resize(img.pixel_count());
  for (std::size_t i = 0; i < out.intensities.size(); ++i) {
    const double r = img.pixels[3 * i + 0];
    const double g = img.pixels[3 * i + 1];
    const double b = img.pixels[3 * i + 2];
    out.intensities[i] = quantize_byte(0.299 * r + 0.587 * g + 0.114 * b);
  }
  return out;
}

std::vector<double> normalize(const GrayImage& img) {
  assert(img.intensities.size() == img.pixel_count());
  std::vector<double> plane(img.intensities.size());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    plane[i] = static_cast<double>(img.intensities[i]) / 255.0;
  }
  return plane;
}

RgbImage denormalize(std::span<const double> planes, int width, int height) {
  const std::size_t n =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  assert(planes.size() == 3 * n);
  RgbImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      double v = planes[static_cast<std::size_t>(c) * n + i];
      if (!std::isfinite(v)) {
        fail(ErrorCode::NonFiniteValue, "denormalize: non-finite plane value");
      }
      v = std::clamp(v, 0.0, 1.0);
      out.pixels[3 * i + c] = quantize_byte(v * 255.0);
    }
  }
  return out;
}

namespace {

// Mirror index about both borders without repeating the edge pixel,
// e.g. n=3 maps 3 -> 1, 4 -> 0.
int reflect_index(int i, int n) {
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

int round_up(int v, int multiple) {
  return ((v + multiple - 1) / multiple) * multiple;
}

}  // namespace

PaddedImage pad_reflect(const GrayImage& img, int multiple) {
  assert(multiple >= 1);
  const int pw = round_up(img.width, multiple);
  const int ph = round_up(img.height, multiple);
  if ((pw != img.width && img.width < 2) ||
      (ph != img.height && img.height < 2)) {
    fail(ErrorCode::ImageTooSmall,
         "pad_reflect: dimension of 1 cannot be mirror-padded");
  }
  PaddedImage result;
  result.original_width = img.width;
  result.original_height = img.height;
  if (pw == img.width && ph == img.height) {
    result.image = img;
    return result;
  }
  GrayImage& out = result.image;
  out.width = pw;
  out.height = ph;
  out.intensities.resize(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    const int sy = y < img.height ? y : reflect_index(y, img.height);
    const std::uint8_t* src =
        img.intensities.data() + static_cast<std::size_t>(sy) * img.width;
    std::uint8_t* dst = out.intensities.data() + static_cast<std::size_t>(y) * pw;
    std::copy(src, src + img.width, dst);
    for (int x = img.width; x < pw; ++x) {
      dst[x] = src[reflect_index(x, img.width)];
    }
  }
  return result;
}

GrayImage crop(const GrayImage& img, int width, int height) {
  assert(width <= img.width && height <= img.height);
  GrayImage out;
  out.width = width;
  out.height = height;
  out.intensities.resize(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src =
        img.intensities.data() + static_cast<std::size_t>(y) * img.width;
    std::copy(src, src + width,
              out.intensities.data() + static_cast<std::size_t>(y) * width);
  }
  return out;
}

RgbImage crop(const RgbImage& img, int width, int height) {
  assert(width <= img.width && height <= img.height);
  RgbImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(3 * static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src =
        img.pixels.data() + 3 * static_cast<std::size_t>(y) * img.width;
    std::copy(src, src + 3 * static_cast<std::size_t>(width),
              out.pixels.data() + 3 * static_cast<std::size_t>(y) * width);
  }
  return out;
}

}  // namespace uwe
