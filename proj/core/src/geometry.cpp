#include "thermalign/geometry.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "thermalign/error.hpp"

namespace thermalign {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTransform: return "invalid-transform";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::DegenerateSurface: return "degenerate-surface";
    case ErrorCode::EmptyOutput: return "empty-output";
    case ErrorCode::NoCorrespondence: return "no-correspondence";
    case ErrorCode::NoPlane: return "no-plane";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::InvalidSpec: return "invalid-spec";
    case ErrorCode::DataFormat: return "data-format";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, kSemanticClassCount> kClassNames = {
    "unlabeled", "wall", "roof", "ground", "window", "door"};

}  // namespace

std::string_view to_string(SemanticClass c) {
  return kClassNames[static_cast<std::size_t>(c)];
}

std::optional<SemanticClass> parse_semantic_class(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  // CityGML thematic surface names map onto the same classes.
  if (lower == "wallsurface") lower = "wall";
  if (lower == "roofsurface") lower = "roof";
  if (lower == "groundsurface") lower = "ground";
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == lower) return static_cast<SemanticClass>(i);
  }
  return std::nullopt;
}

std::optional<SemanticClass> semantic_class_from_code(std::uint8_t code) {
  if (code >= kSemanticClassCount) return std::nullopt;
  return static_cast<SemanticClass>(code);
}

std::uint32_t PointCloud::intern_id(std::string_view name) {
  const auto it = std::find(id_names.begin(), id_names.end(), name);
  if (it != id_names.end()) return static_cast<std::uint32_t>(it - id_names.begin());
  id_names.emplace_back(name);
  return static_cast<std::uint32_t>(id_names.size() - 1);
}

void PointCloud::validate() const {
  const std::size_t n = points.size();
  auto check_size = [n](std::size_t got, const char* what) {
    if (got != 0 && got != n) {
      throw Error(ErrorCode::InvalidParameter,
                  std::string(what) + " has " + std::to_string(got) + " entries for " +
                      std::to_string(n) + " points");
    }
  };
  check_size(intensity.size(), "intensity");
  check_size(labels.size(), "label");
  check_size(ids.size(), "id");
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidParameter, "non-finite point coordinate");
  }
  for (float v : intensity) {
    if (v == v && (v < 0.0f || v > 1.0f)) {
      throw Error(ErrorCode::InvalidParameter, "intensity outside [0,1]");
    }
  }
  for (auto id : ids) {
    if (id != kNoId && id >= id_names.size()) {
      throw Error(ErrorCode::InvalidParameter, "id index outside the id table");
    }
  }
}

PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
  PointCloud out;
  out.id_names = cloud.id_names;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(cloud.points[i]);
  if (cloud.has_intensity()) {
    for (auto i : indices) out.intensity.push_back(cloud.intensity[i]);
  }
  if (cloud.has_labels()) {
    for (auto i : indices) out.labels.push_back(cloud.labels[i]);
  }
  if (cloud.has_ids()) {
    for (auto i : indices) out.ids.push_back(cloud.ids[i]);
  }
  return out;
}

Point3 centroid(const std::vector<Point3>& points) {
  Point3 c = Point3::Zero();
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

}  // namespace thermalign
