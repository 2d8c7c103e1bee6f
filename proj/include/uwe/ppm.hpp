#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uwe/image.hpp"

namespace uwe {

using Image = std::variant<RgbImage, GrayImage>;

/// Decodes a binary PPM ("P6") or PGM ("P5") with maxval 255.
/// Header whitespace and '#' comments follow the netpbm rules.
Image read_ppm(std::span<const std::uint8_t> bytes);

/// Canonical encoding: "P6\n{w} {h}\n255\n" (or "P5...") + raw payload.
/// read_ppm(write_ppm(x)) == x, and re-encoding is byte-identical.
std::vector<std::uint8_t> write_ppm(const RgbImage& img);
std::vector<std::uint8_t> write_ppm(const GrayImage& img);
std::vector<std::uint8_t> write_ppm(const Image& img);

int channel_count(const Image& img);
int image_width(const Image& img);
int image_height(const Image& img);

}  // namespace uwe
