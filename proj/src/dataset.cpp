#include "uwe/dataset.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "uwe/fileio.hpp"

namespace uwe {

Manifest load_manifest(const std::string& text) {
  Manifest manifest;
  std::set<std::pair<std::string, std::string>> seen;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      fail(ErrorCode::MalformedLine,
           "manifest line " + std::to_string(line_no) +
               ": expected input_path TAB reference_path");
    }
    ManifestEntry entry;
    entry.input_path = line.substr(0, tab);
    entry.reference_path = line.substr(tab + 1);
    entry.line = line_no;
    if (!seen.insert({entry.input_path, entry.reference_path}).second) {
      fail(ErrorCode::DuplicatePair,
           "manifest line " + std::to_string(line_no) + ": duplicate pair");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

Manifest load_manifest_file(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return load_manifest(std::string(bytes.begin(), bytes.end()));
}

namespace {

GrayImage gray_patch(const GrayImage& img, int x0, int y0, int size) {
  GrayImage out;
  out.width = size;
  out.height = size;
  out.intensities.resize(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    const std::uint8_t* src = img.intensities.data() +
                              static_cast<std::size_t>(y0 + y) * img.width + x0;
    std::copy(src, src + size,
              out.intensities.data() + static_cast<std::size_t>(y) * size);
  }
  return out;
}

RgbImage rgb_patch(const RgbImage& img, int x0, int y0, int size) {
  RgbImage out;
  out.width = size;
  out.height = size;
  out.pixels.resize(3 * static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    const std::uint8_t* src =
        img.pixels.data() +
        3 * (static_cast<std::size_t>(y0 + y) * img.width + x0);
    std::copy(src, src + 3 * static_cast<std::size_t>(size),
              out.pixels.data() + 3 * static_cast<std::size_t>(y) * size);
  }
  return out;
}

}  // namespace

std::vector<PatchPair> extract_patches(const GrayImage& gray,
                                       const RgbImage& rgb, int size,
                                       int count, Prng& rng) {
  assert(gray.width == rgb.width && gray.height == rgb.height);
  if (size > gray.width || size > gray.height) {
    fail(ErrorCode::PatchTooLarge,
         "extract_patches: patch size exceeds image dimensions");
  }
  const std::uint64_t xs = static_cast<std::uint64_t>(gray.width - size + 1);
  const std::uint64_t ys = static_cast<std::uint64_t>(gray.height - size + 1);
  std::vector<PatchPair> patches;
  patches.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int x0 = static_cast<int>(rng.uniform_index(xs));
    const int y0 = static_cast<int>(rng.uniform_index(ys));
    patches.push_back(
        {gray_patch(gray, x0, y0, size), rgb_patch(rgb, x0, y0, size)});
  }
  return patches;
}

RgbImage synth_degrade(const RgbImage& img, const DegradeParams& params) {
  assert(img.pixels.size() == 3 * img.pixel_count());
  assert(params.r_gain > 0.0 && params.r_gain <= 1.0);
  assert(params.g_gain > 0.0 && params.g_gain <= 1.0);
  assert(params.b_gain > 0.0 && params.b_gain <= 1.0);
  assert(params.contrast > 0.0 && params.contrast <= 1.0);
  assert(params.lift >= 0.0 && params.lift <= 0.3);
  const double gains[3] = {params.r_gain, params.g_gain, params.b_gain};
  // One 256-entry lookup per channel; the transform is pointwise.
  std::uint8_t lut[3][256];
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 256; ++v) {
      const double scaled =
          gains[c] * (params.contrast * (v / 255.0) + params.lift);
      lut[c][v] = quantize_byte(std::clamp(scaled, 0.0, 1.0) * 255.0);
    }
  }
  RgbImage out = img;
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    out.pixels[i + 0] = lut[0][out.pixels[i + 0]];
    out.pixels[i + 1] = lut[1][out.pixels[i + 1]];
    out.pixels[i + 2] = lut[2][out.pixels[i + 2]];
  }
  return out;
}

}  // namespace uwe
