#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace thermalign::io {

/// Whole file as bytes. Throws Error(Io) when it cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`, so readers
/// never observe a partial file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace thermalign::io
