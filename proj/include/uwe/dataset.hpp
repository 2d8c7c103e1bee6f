#pragma once

#include <string>
#include <vector>

#include "uwe/image.hpp"
#include "uwe/rng.hpp"

namespace uwe {

struct ManifestEntry {
  std::string input_path;
  std::string reference_path;
  int line = 0;  // 1-based line in the manifest file, for error messages
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

/// One pair per line: input_path TAB reference_path. Blank lines and lines
/// starting with '#' are skipped. Throws MalformedLine (with the line
/// number) and DuplicatePair.
Manifest load_manifest(const std::string& text);
Manifest load_manifest_file(const std::string& path);

struct PatchPair {
  GrayImage gray;
  RgbImage rgb;
};

/// Draws `count` aligned patches; each corner x in [0, W-size] and
/// y in [0, H-size] uniformly via the carried Prng (x drawn before y).
/// Throws PatchTooLarge when the images are smaller than the patch.
std::vector<PatchPair> extract_patches(const GrayImage& gray,
                                       const RgbImage& rgb, int size,
                                       int count, Prng& rng);

/// Blue-green cast plus contrast compression and fog lift; a synthetic
/// stand-in for underwater degradation so training and evaluation are
/// testable without external data. Per channel with gain k:
/// v' = round(clamp(k * (contrast * v/255 + lift), 0, 1) * 255).
struct DegradeParams {
  double r_gain = 0.35;
  double g_gain = 0.85;
  double b_gain = 0.95;
  double contrast = 0.6;
  double lift = 0.1;
};

RgbImage synth_degrade(const RgbImage& img, const DegradeParams& params = {});

}  // namespace uwe
