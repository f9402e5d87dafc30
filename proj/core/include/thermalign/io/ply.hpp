#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "thermalign/geometry.hpp"

namespace thermalign::io {

/// Binary little-endian PLY. Vertex properties are x, y, z (double) plus,
/// when present, intensity (float, NaN for none), label (uchar) and id
/// (uint, 0xffffffff for none). The id string table is stored in header
/// comments of the form `comment thermalign id <index> <name>`.
std::string encode_ply(const PointCloud& cloud);

/// Reads binary little-endian or ASCII PLY. Positions may be float or
/// double; unknown vertex properties are skipped.
PointCloud decode_ply(std::string_view bytes);

PointCloud read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace thermalign::io
