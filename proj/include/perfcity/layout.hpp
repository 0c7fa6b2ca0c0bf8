#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "perfcity/model.hpp"

namespace perfcity {

enum class ColorScale { Linear, Log };

std::string_view to_string(ColorScale scale) noexcept;
ColorScale color_scale_from_string(std::string_view text);  // throws InvalidConfig

struct LayoutConfig {
  double unitHeight = 1.0;   // world units per method
  double minHeight = 1.0;
  double unitArea = 1.0;     // footprint area per attribute
  double minSide = 1.0;
  double margin = 1.0;       // gap between sibling footprints
  double districtPad = 1.0;  // district border
  double colorRef = 1000.0;  // calls per window mapped to full intensity
  ColorScale colorScale = ColorScale::Log;
  double scale = 1.0;        // longest scene side in world units after normalization

  // Throws Error{InvalidConfig}. colorRef must be at least 1.
  void validate() const;
};

struct BuildingDims {
  double height = 0;
  double side = 0;
};

// height = max(minHeight, unitHeight * numMethods)
// side   = max(minSide, sqrt(unitArea * numAttributes))
BuildingDims building_dimensions(const ClassInfo& cls, const LayoutConfig& cfg);

struct Rect {
  double x = 0;
  double z = 0;
  double width = 0;
  double depth = 0;

  bool operator==(const Rect&) const = default;
};

struct Building {
  std::string classId;
  double x = 0;  // footprint corner
  double z = 0;
  double side = 0;
  double height = 0;

  bool operator==(const Building&) const = default;
};

struct District {
  std::vector<std::string> packagePath;  // empty for the synthetic system root
  Rect bounds;
  std::vector<District> children;
  std::vector<Building> buildings;
  int depthLevel = 0;

  bool operator==(const District&) const = default;
};

// Geometry is kept in layout units so building dimensions stay exactly as
// building_dimensions() computes them; `worldScale` is the uniform factor a
// renderer applies to fit the longest side of `extent` to cfg.scale.
struct CityScene {
  District root;
  std::uint64_t modelRevision = 0;
  Rect extent;
  double worldScale = 1.0;

  bool operator==(const CityScene&) const = default;
};

// Pure and deterministic. Each package becomes a district whose items (its
// buildings in class order, then its sub-districts by name) are packed in
// rows; the row width is chosen to keep the district closest to square.
CityScene layout_city(const SystemModel& model, const LayoutConfig& cfg);

// Visits every building with its enclosing district.
template <typename Fn>
void for_each_building(const District& district, Fn&& fn) {
  for (const auto& b : district.buildings) fn(district, b);
  for (const auto& c : district.children) for_each_building(c, fn);
}

struct ColorValue {
  double intensity = 0;  // [0, 1]

  // Neutral gray at 0, saturated red at 1.
  std::array<double, 3> rgb() const;
  bool operator==(const ColorValue&) const = default;
};

ColorValue color_for(std::uint64_t count, const LayoutConfig& cfg);

// Scene document: one JSON object with "kind":"scene".
std::string scene_serialize(const CityScene& scene);
CityScene scene_parse(std::string_view doc);  // throws Error{MalformedScene}

}  // namespace perfcity
