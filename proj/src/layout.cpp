#include "perfcity/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perfcity/error.hpp"

namespace perfcity {
namespace {

struct Slot {
  double x = 0;
  double z = 0;
};

struct Packing {
  std::vector<Slot> slots;
  double width = 0;
  double depth = 0;
};

struct Extent {
  double width = 0;
  double depth = 0;
};

// Greedy rows: an item wraps to a new row when it would cross `limit`, unless
// the row is still empty.
Packing pack_rows(const std::vector<Extent>& items, double limit, double margin) {
  Packing p;
  p.slots.reserve(items.size());
  double x = 0;
  double z = 0;
  double rowDepth = 0;
  bool rowEmpty = true;
  for (const auto& it : items) {
    if (!rowEmpty && x + it.width > limit) {
      z = z + rowDepth + margin;
      x = 0;
      rowDepth = 0;
      rowEmpty = true;
    }
    p.slots.push_back({x, z});
    const double end = x + it.width;
    p.width = std::max(p.width, end);
    rowDepth = std::max(rowDepth, it.depth);
    x = end + margin;
    rowEmpty = false;
  }
  p.depth = z + rowDepth;
  return p;
}

// Tries every first-row break point and keeps the squarest result.
Packing pack(const std::vector<Extent>& items, double margin) {
  if (items.empty()) return {};
  Packing best;
  double bestAspect = std::numeric_limits<double>::infinity();
  double bestArea = std::numeric_limits<double>::infinity();
  double acc = 0;
  for (const auto& it : items) {
    const double limit = acc + it.width;
    acc = limit + margin;
    Packing p = pack_rows(items, limit, margin);
    const double lo = std::min(p.width, p.depth);
    const double hi = std::max(p.width, p.depth);
    const double aspect = hi / lo;
    const double area = p.width * p.depth;
    if (aspect < bestAspect || (aspect == bestAspect && area < bestArea)) {
      bestAspect = aspect;
      bestArea = area;
      best = std::move(p);
    }
  }
  return best;
}

void translate(District& d, double dx, double dz) {
  d.bounds.x += dx;
  d.bounds.z += dz;
  for (auto& b : d.buildings) {
    b.x += dx;
    b.z += dz;
  }
  for (auto& c : d.children) translate(c, dx, dz);
}

// Lays out `node` with its corner at the origin.
District build(const PackageNode& node, std::vector<std::string>& path, int depth, const SystemModel& model,
               const LayoutConfig& cfg) {
  District d;
  d.packagePath = path;
  d.depthLevel = depth;

  std::vector<Extent> items;
  for (const auto& id : node.classes) {
    const auto dims = building_dimensions(*model.find(id), cfg);
    d.buildings.push_back(Building{id, 0, 0, dims.side, dims.height});
    items.push_back({dims.side, dims.side});
  }
  for (const auto& child : node.children) {
    path.push_back(child.name);
    d.children.push_back(build(child, path, depth + 1, model, cfg));
    path.pop_back();
    items.push_back({d.children.back().bounds.width, d.children.back().bounds.depth});
  }

  const Packing p = pack(items, cfg.margin);
  std::size_t i = 0;
  for (auto& b : d.buildings) {
    b.x = cfg.districtPad + p.slots[i].x;
    b.z = cfg.districtPad + p.slots[i].z;
    ++i;
  }
  for (auto& c : d.children) {
    translate(c, cfg.districtPad + p.slots[i].x, cfg.districtPad + p.slots[i].z);
    ++i;
  }
  d.bounds = Rect{0, 0, p.width + 2 * cfg.districtPad, p.depth + 2 * cfg.districtPad};
  return d;
}

}  // namespace

std::string_view to_string(ColorScale scale) noexcept {
  return scale == ColorScale::Linear ? "linear" : "log";
}

ColorScale color_scale_from_string(std::string_view text) {
  if (text == "linear") return ColorScale::Linear;
  if (text == "log") return ColorScale::Log;
  throw Error(Errc::InvalidConfig, "color scale must be 'linear' or 'log', got '" + std::string(text) + "'");
}

void LayoutConfig::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"unitHeight", unitHeight}, {"minHeight", minHeight}, {"unitArea", unitArea},
      {"minSide", minSide},       {"margin", margin},       {"districtPad", districtPad},
      {"colorRef", colorRef},     {"scale", scale},
  };
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || value <= 0) {
      throw Error(Errc::InvalidConfig, std::string(name) + " must be a finite value > 0");
    }
  }
  if (colorRef < 1) throw Error(Errc::InvalidConfig, "colorRef must be >= 1");
}

BuildingDims building_dimensions(const ClassInfo& cls, const LayoutConfig& cfg) {
  const double methods = static_cast<double>(cls.numMethods);
  const double attrs = static_cast<double>(cls.numAttributes);
  return BuildingDims{
      std::max(cfg.minHeight, cfg.unitHeight * methods),
      std::max(cfg.minSide, std::sqrt(cfg.unitArea * attrs)),
  };
}

CityScene layout_city(const SystemModel& model, const LayoutConfig& cfg) {
  cfg.validate();
  CityScene scene;
  scene.modelRevision = model.revision();
  std::vector<std::string> path;
  const PackageNode& root = model.root();
  if (root.classes.empty() && root.children.size() == 1) {
    // A single top-level package is the city itself.
    path.push_back(root.children.front().name);
    scene.root = build(root.children.front(), path, 0, model, cfg);
  } else {
    scene.root = build(root, path, 0, model, cfg);
  }
  scene.extent = scene.root.bounds;
  scene.worldScale = cfg.scale / std::max(scene.extent.width, scene.extent.depth);
  return scene;
}

std::array<double, 3> ColorValue::rgb() const {
  constexpr double gray = 0.5;
  return {gray + (1.0 - gray) * intensity, gray * (1.0 - intensity), gray * (1.0 - intensity)};
}

ColorValue color_for(std::uint64_t count, const LayoutConfig& cfg) {
  if (count == 0) return ColorValue{0.0};
  const double c = static_cast<double>(count);
  double v = 0;
  if (cfg.colorScale == ColorScale::Linear) {
    v = c / cfg.colorRef;
  } else {
    v = std::log1p(c) / std::log1p(cfg.colorRef);
  }
  return ColorValue{std::min(1.0, v)};
}

}  // namespace perfcity
