#include "uwe/ppm.hpp"

#include <cassert>
#include <cctype>
#include <cstring>

namespace uwe {

namespace {

bool is_pnm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> bytes)
      : bytes_(bytes), pos_(2) {}  // past the 2-byte magic

  // Whitespace and '#'-to-end-of-line comments may appear between tokens.
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      if (is_pnm_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* what) {
    skip_separators();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCode::MalformedHeader,
           std::string("ppm: expected integer for ") + what);
    }
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000ull) {
        fail(ErrorCode::MalformedHeader,
             std::string("ppm: ") + what + " out of range");
      }
      ++pos_;
    }
    return value;
  }

  // The header ends with exactly one whitespace byte before the payload.
  std::size_t finish() {
    if (pos_ >= bytes_.size() || !is_pnm_space(bytes_[pos_])) {
      fail(ErrorCode::MalformedHeader, "ppm: missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

void append_header(std::vector<std::uint8_t>& out, char magic, int w, int h) {
  const std::string header = std::string("P") + magic + "\n" +
                             std::to_string(w) + " " + std::to_string(h) +
                             "\n255\n";
  out.insert(out.end(), header.begin(), header.end());
}

}  // namespace

Image read_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '5' && bytes[1] != '6')) {
    fail(ErrorCode::UnsupportedMagic, "ppm: magic is not P5 or P6");
  }
  const bool color = bytes[1] == '6';
  HeaderScanner scanner(bytes);
  const std::uint64_t w = scanner.read_uint("width");
  const std::uint64_t h = scanner.read_uint("height");
  const std::uint64_t maxval = scanner.read_uint("maxval");
  if (w == 0 || h == 0) {
    fail(ErrorCode::MalformedHeader, "ppm: zero dimension");
  }
  if (maxval != 255) {
    fail(ErrorCode::UnsupportedMaxval, "ppm: only maxval 255 is supported");
  }
  const std::size_t payload_start = scanner.finish();
  const std::size_t need = (color ? 3 : 1) * w * h;
  if (bytes.size() - payload_start < need) {
    fail(ErrorCode::Truncated, "ppm: payload shorter than header promises");
  }
  if (color) {
    RgbImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.assign(bytes.begin() + payload_start,
                      bytes.begin() + payload_start + need);
    return img;
  }
  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.intensities.assign(bytes.begin() + payload_start,
                         bytes.begin() + payload_start + need);
  return img;
}

std::vector<std::uint8_t> write_ppm(const RgbImage& img) {
  assert(img.pixels.size() == 3 * img.pixel_count());
  std::vector<std::uint8_t> out;
  out.reserve(img.pixels.size() + 32);
  append_header(out, '6', img.width, img.height);
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

std::vector<std::uint8_t> write_ppm(const GrayImage& img) {
  assert(img.intensities.size() == img.pixel_count());
  std::vector<std::uint8_t> out;
  out.reserve(img.intensities.size() + 32);
  append_header(out, '5', img.width, img.height);
  out.insert(out.end(), img.intensities.begin(), img.intensities.end());
  return out;
}

std::vector<std::uint8_t> write_ppm(const Image& img) {
  return std::visit([](const auto& i) { return write_ppm(i); }, img);
}

int channel_count(const Image& img) {
  return std::holds_alternative<RgbImage>(img) ? 3 : 1;
}

int image_width(const Image& img) {
  return std::visit([](const auto& i) { return i.width; }, img);
}

int image_height(const Image& img) {
  return std::visit([](const auto& i) { return i.height; }, img);
}

}  // namespace uwe
