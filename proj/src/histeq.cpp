#include "uwe/histeq.hpp"

#include <cassert>

namespace uwe {

Histogram histogram(const GrayImage& img) {
  if (img.pixel_count() == 0) {
    fail(ErrorCode::EmptyImage, "histogram: image has no pixels");
  }
  assert(img.intensities.size() == img.pixel_count());
  Histogram h;
  h.total = img.pixel_count();
  for (std::uint8_t v : img.intensities) {
    ++h.counts[v];
  }
  return h;
}

IntensityMap equalization_map(const Histogram& h) {
  assert(h.total > 0);
  IntensityMap map;
  std::uint64_t cum = 0;
  for (int k = 0; k < kLevels; ++k) {
    cum += h.counts[k];
    map.table[k] =
        static_cast<std::uint8_t>((kLevels - 1) * cum / h.total);
  }
  return map;
}

GrayImage equalize(const GrayImage& img) {
  const IntensityMap map = equalization_map(histogram(img));
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.intensities.resize(img.pixel_count());
  for (std::size_t i = 0; i < out.intensities.size(); ++i) {
    out.intensities[i] = map.table[img.intensities[i]];
  }
  return out;
}

}  // namespace uwe
