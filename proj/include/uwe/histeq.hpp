#pragma once

#include <array>
#include <cstdint>

#include "uwe/image.hpp"

namespace uwe {

/// Intensity counts of a grayscale image. Counts are kept as exact integers;
/// the normalized histogram exists only as counts[n] / total.
struct Histogram {
  std::array<std::uint64_t, kLevels> counts{};
  std::uint64_t total = 0;
};

/// The equalization transform table T: intensity k maps to table[k].
/// Monotone nondecreasing; the highest occupied input intensity maps to 255.
struct IntensityMap {
  std::array<std::uint8_t, kLevels> table{};
};

/// Throws EmptyImage for a zero-pixel image.
Histogram histogram(const GrayImage& img);

/// table[k] = floor(255 * cum(k) / total), evaluated in exact integer
/// arithmetic ((255 * cum) div total) so that equalization is exactly
/// idempotent and free of floating-point boundary effects.
IntensityMap equalization_map(const Histogram& h);

/// Applies equalization_map(histogram(img)) pixelwise.
GrayImage equalize(const GrayImage& img);

}  // namespace uwe
