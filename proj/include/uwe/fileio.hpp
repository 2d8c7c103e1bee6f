#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uwe/ppm.hpp"

namespace uwe {

/// Reads a whole file; throws Error(Io) when it cannot be opened or read.
std::vector<std::uint8_t> read_file(const std::string& path);

/// Writes to a temporary sibling and renames into place, so failures never
/// leave a partial file at the destination.
void write_file_atomic(const std::string& path,
                       std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::string& path, const std::string& text);

Image load_image(const std::string& path);
void save_image(const std::string& path, const Image& img);

}  // namespace uwe
