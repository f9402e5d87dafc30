#include "thermalign/io/ply.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "thermalign/error.hpp"
#include "thermalign/io/file_util.hpp"

namespace thermalign::io {
namespace {

static_assert(std::endian::native == std::endian::little, "PLY codec assumes a little-endian host");

constexpr std::string_view kIdComment = "comment thermalign id ";

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

enum class Scalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<Scalar> parse_scalar(std::string_view t) {
  if (t == "char" || t == "int8") return Scalar::Int8;
  if (t == "uchar" || t == "uint8") return Scalar::UInt8;
  if (t == "short" || t == "int16") return Scalar::Int16;
  if (t == "ushort" || t == "uint16") return Scalar::UInt16;
  if (t == "int" || t == "int32") return Scalar::Int32;
  if (t == "uint" || t == "uint32") return Scalar::UInt32;
  if (t == "float" || t == "float32") return Scalar::Float32;
  if (t == "double" || t == "float64") return Scalar::Float64;
  return std::nullopt;
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::Int8:
    case Scalar::UInt8: return 1;
    case Scalar::Int16:
    case Scalar::UInt16: return 2;
    case Scalar::Int32:
    case Scalar::UInt32:
    case Scalar::Float32: return 4;
    case Scalar::Float64: return 8;
  }
  return 0;
}

template <typename T>
T get(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double read_binary(Scalar s, const char* p) {
  switch (s) {
    case Scalar::Int8: return get<std::int8_t>(p);
    case Scalar::UInt8: return get<std::uint8_t>(p);
    case Scalar::Int16: return get<std::int16_t>(p);
    case Scalar::UInt16: return get<std::uint16_t>(p);
    case Scalar::Int32: return get<std::int32_t>(p);
    case Scalar::UInt32: return get<std::uint32_t>(p);
    case Scalar::Float32: return get<float>(p);
    case Scalar::Float64: return get<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  Scalar type = Scalar::Float64;
  bool is_list = false;
  Scalar count_type = Scalar::UInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::DataFormat, "PLY: " + what); }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad count '" + std::string(s) + "'");
  return v;
}

void store(PointCloud& cloud, std::size_t i, int slot, double value) {
  switch (slot) {
    case 0:
    case 1:
    case 2: cloud.points[i][slot] = value; break;
    case 3: cloud.intensity[i] = static_cast<float>(value); break;
    case 4: {
      if (!(value >= 0.0 && value <= 255.0)) fail("label out of range");
      const auto label = semantic_class_from_code(static_cast<std::uint8_t>(value));
      if (!label) fail("unknown label code " + std::to_string(static_cast<int>(value)));
      cloud.labels[i] = *label;
      break;
    }
    case 5: cloud.ids[i] = static_cast<std::uint32_t>(value); break;
    default: break;
  }
}

}  // namespace

std::string encode_ply(const PointCloud& cloud) {
  cloud.validate();
  std::string out;
  out += "ply\nformat binary_little_endian 1.0\n";
  for (std::size_t k = 0; k < cloud.id_names.size(); ++k) {
    const auto& name = cloud.id_names[k];
    if (name.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidParameter, "PLY: id names must not contain line breaks");
    }
    out += std::string(kIdComment) + std::to_string(k) + " " + name + "\n";
  }
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (cloud.has_intensity()) out += "property float intensity\n";
  if (cloud.has_labels()) out += "property uchar label\n";
  if (cloud.has_ids()) out += "property uint id\n";
  out += "end_header\n";

  std::size_t stride = 24 + (cloud.has_intensity() ? 4 : 0) + (cloud.has_labels() ? 1 : 0) + (cloud.has_ids() ? 4 : 0);
  out.reserve(out.size() + stride * cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    put(out, cloud.points[i].x());
    put(out, cloud.points[i].y());
    put(out, cloud.points[i].z());
    if (cloud.has_intensity()) put(out, cloud.intensity[i]);
    if (cloud.has_labels()) put(out, static_cast<std::uint8_t>(cloud.labels[i]));
    if (cloud.has_ids()) put(out, cloud.ids[i]);
  }
  return out;
}

PointCloud decode_ply(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= bytes.size()) fail("unexpected end of header");
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) fail("unterminated header");
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  if (next_line() != "ply") fail("missing magic");
  bool binary = false;
  bool format_seen = false;
  std::vector<Element> elements;
  std::vector<std::pair<std::size_t, std::string>> id_table;
  for (;;) {
    const std::string_view line = next_line();
    if (line == "end_header") break;
    if (line.starts_with(kIdComment)) {
      const std::string_view rest = line.substr(kIdComment.size());
      const std::size_t space = rest.find(' ');
      if (space == std::string_view::npos) fail("malformed id comment");
      id_table.emplace_back(parse_count(rest.substr(0, space)), std::string(rest.substr(space + 1)));
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail("malformed format line");
      if (tok[1] == "binary_little_endian") {
        binary = true;
      } else if (tok[1] == "ascii") {
        binary = false;
      } else {
        fail("unsupported format " + std::string(tok[1]));
      }
      format_seen = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) fail("malformed element line");
      elements.push_back({std::string(tok[1]), parse_count(tok[2]), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail("property before element");
      Property p;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = parse_scalar(tok[2]);
        const auto vt = parse_scalar(tok[3]);
        if (!ct || !vt) fail("unknown list type");
        p = {std::string(tok[4]), *vt, true, *ct};
      } else if (tok.size() == 3) {
        const auto t = parse_scalar(tok[1]);
        if (!t) fail("unknown property type " + std::string(tok[1]));
        p = {std::string(tok[2]), *t, false, Scalar::UInt8};
      } else {
        fail("malformed property line");
      }
      elements.back().properties.push_back(p);
    } else {
      fail("unexpected header line '" + std::string(line) + "'");
    }
  }
  if (!format_seen) fail("missing format line");

  PointCloud cloud;
  bool have_vertex = false;
  std::istringstream ascii_stream;
  if (!binary) ascii_stream.str(std::string(bytes.substr(pos)));

  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex";
    if (is_vertex && have_vertex) fail("duplicate vertex element");
    std::vector<int> slot(el.properties.size(), -1);
    if (is_vertex) {
      have_vertex = true;
      bool xyz[3] = {false, false, false};
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        const auto& p = el.properties[k];
        if (p.is_list) continue;
        if (p.name == "x") slot[k] = 0, xyz[0] = true;
        else if (p.name == "y") slot[k] = 1, xyz[1] = true;
        else if (p.name == "z") slot[k] = 2, xyz[2] = true;
        else if (p.name == "intensity") slot[k] = 3;
        else if (p.name == "label") slot[k] = 4;
        else if (p.name == "id") slot[k] = 5;
      }
      if (!xyz[0] || !xyz[1] || !xyz[2]) fail("vertex element lacks x/y/z");
      cloud.points.assign(el.count, Point3::Zero());
      for (int s : slot) {
        if (s == 3) cloud.intensity.assign(el.count, std::numeric_limits<float>::quiet_NaN());
        if (s == 4) cloud.labels.assign(el.count, SemanticClass::Unlabeled);
        if (s == 5) cloud.ids.assign(el.count, kNoId);
      }
    }

    for (std::size_t i = 0; i < el.count; ++i) {
      for (std::size_t k = 0; k < el.properties.size(); ++k) {
        const auto& p = el.properties[k];
        if (binary) {
          if (p.is_list) {
            const std::size_t cs = scalar_size(p.count_type);
            if (pos + cs > bytes.size()) fail("truncated payload");
            const double n = read_binary(p.count_type, bytes.data() + pos);
            if (n < 0) fail("negative list length");
            pos += cs + static_cast<std::size_t>(n) * scalar_size(p.type);
            if (pos > bytes.size()) fail("truncated payload");
            continue;
          }
          const std::size_t sz = scalar_size(p.type);
          if (pos + sz > bytes.size()) fail("truncated payload");
          const double v = read_binary(p.type, bytes.data() + pos);
          pos += sz;
          if (is_vertex && slot[k] >= 0) store(cloud, i, slot[k], v);
        } else {
          if (p.is_list) {
            double n = 0;
            if (!(ascii_stream >> n) || n < 0) fail("bad ASCII list length");
            std::string skip;
            for (std::size_t m = 0; m < static_cast<std::size_t>(n); ++m) {
              if (!(ascii_stream >> skip)) fail("truncated ASCII payload");
            }
            continue;
          }
          std::string token;
          if (!(ascii_stream >> token)) fail("truncated ASCII payload");
          double v = 0.0;
          if (token == "nan" || token == "NaN" || token == "-nan") {
            v = std::numeric_limits<double>::quiet_NaN();
          } else {
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || ptr != token.data() + token.size()) fail("bad ASCII value '" + token + "'");
          }
          if (is_vertex && slot[k] >= 0) store(cloud, i, slot[k], v);
        }
      }
    }
  }
  if (!have_vertex) fail("no vertex element");

  for (const auto& [index, name] : id_table) {
    if (index >= cloud.id_names.size()) cloud.id_names.resize(index + 1);
    cloud.id_names[index] = name;
  }
  for (auto id : cloud.ids) {
    if (id != kNoId && id >= cloud.id_names.size()) fail("id " + std::to_string(id) + " has no name in the header");
  }
  return cloud;
}

PointCloud read_ply(const std::filesystem::path& path) {
  try {
    return decode_ply(read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DataFormat) throw;
    throw Error(ErrorCode::DataFormat, path.string() + ": " + e.what());
  }
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  write_file_atomic(path, encode_ply(cloud));
}

}  // namespace thermalign::io
