#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "thermalign/camera.hpp"

namespace thermalign::io {

/// Binary P5 greymap, max value 255 (8-bit) or 65535 (16-bit big-endian).
/// Pixel values are divided by the max value on load.
Image decode_pgm(std::string_view bytes);
Image read_pgm(const std::filesystem::path& path);

/// Values are clamped to [0, 1] and rounded to the nearest level.
std::string encode_pgm(const Image& image, int max_value = 65535);
void write_pgm(const std::filesystem::path& path, const Image& image, int max_value = 65535);

}  // namespace thermalign::io
