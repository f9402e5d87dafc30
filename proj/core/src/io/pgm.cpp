#include "thermalign/io/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "thermalign/error.hpp"
#include "thermalign/io/file_util.hpp"

namespace thermalign::io {
namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::DataFormat, "PGM: " + what); }

// Header tokens are separated by whitespace; '#' starts a comment.
long next_int(std::string_view bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) fail("malformed header");
  long v = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    v = v * 10 + (bytes[pos] - '0');
    if (v > 1'000'000'000L) fail("header value too large");
    ++pos;
  }
  return v;
}

}  // namespace

Image decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail("not a binary P5 file");
  std::size_t pos = 2;
  const long w = next_int(bytes, pos);
  const long h = next_int(bytes, pos);
  const long maxval = next_int(bytes, pos);
  if (w <= 0 || h <= 0) fail("non-positive dimensions");
  if (maxval != 255 && maxval != 65535) fail("max value must be 255 or 65535");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) fail("malformed header");
  ++pos;
  const std::size_t bpp = maxval == 255 ? 1 : 2;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n * bpp) fail("truncated pixel data");

  Image img(static_cast<int>(w), static_cast<int>(h));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bpp == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    img.pixels[i] = static_cast<float>(v * scale);
  }
  return img;
}

Image read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataFormat) throw;
    throw Error(ErrorCode::DataFormat, path.string() + ": " + e.what());
  }
}

std::string encode_pgm(const Image& image, int max_value) {
  if (max_value != 255 && max_value != 65535) {
    throw Error(ErrorCode::InvalidParameter, "PGM max value must be 255 or 65535");
  }
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
    throw Error(ErrorCode::InvalidParameter, "PGM: image dimensions do not match its pixel buffer");
  }
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" +
                    std::to_string(max_value) + "\n";
  for (float f : image.pixels) {
    const double c = std::clamp(static_cast<double>(f), 0.0, 1.0);
    const auto v = static_cast<unsigned>(std::lround(c * max_value));
    if (max_value == 255) {
      out.push_back(static_cast<char>(v));
    } else {
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const Image& image, int max_value) {
  write_file_atomic(path, encode_pgm(image, max_value));
}

}  // namespace thermalign::io
