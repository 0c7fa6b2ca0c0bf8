#include "perfcity/error.hpp"
#include "perfcity/layout.hpp"
#include "wire_json.hpp"

namespace perfcity {
namespace {

using detail::ojson;

ojson rect_to_json(const Rect& r) {
  ojson v;
  v["x"] = r.x;
  v["z"] = r.z;
  v["width"] = r.width;
  v["depth"] = r.depth;
  return v;
}

Rect rect_from_json(const ojson& v) {
  using namespace detail;
  as_object(v, "bounds");
  return Rect{as_double(field(v, "x"), "x"), as_double(field(v, "z"), "z"),
              as_double(field(v, "width"), "width"), as_double(field(v, "depth"), "depth")};
}

ojson district_to_json(const District& d) {
  ojson v;
  v["packagePath"] = d.packagePath;
  v["depthLevel"] = d.depthLevel;
  v["bounds"] = rect_to_json(d.bounds);
  ojson buildings = ojson::array();
  for (const auto& b : d.buildings) {
    ojson bv;
    bv["classId"] = b.classId;
    bv["x"] = b.x;
    bv["z"] = b.z;
    bv["side"] = b.side;
    bv["height"] = b.height;
    buildings.push_back(std::move(bv));
  }
  v["buildings"] = std::move(buildings);
  ojson children = ojson::array();
  for (const auto& c : d.children) children.push_back(district_to_json(c));
  v["children"] = std::move(children);
  return v;
}

District district_from_json(const ojson& v, int nesting) {
  using namespace detail;
  if (nesting > 256) throw Error(Errc::SchemaViolation, "district nesting too deep");
  as_object(v, "district");
  District d;
  d.packagePath = as_string_list(field(v, "packagePath"), "packagePath");
  d.depthLevel = static_cast<int>(as_int(field(v, "depthLevel"), "depthLevel"));
  d.bounds = rect_from_json(field(v, "bounds"));
  for (const auto& bv : as_array(field(v, "buildings"), "buildings")) {
    as_object(bv, "building");
    d.buildings.push_back(Building{as_string(field(bv, "classId"), "classId"), as_double(field(bv, "x"), "x"),
                                   as_double(field(bv, "z"), "z"), as_double(field(bv, "side"), "side"),
                                   as_double(field(bv, "height"), "height")});
  }
  for (const auto& cv : as_array(field(v, "children"), "children")) {
    d.children.push_back(district_from_json(cv, nesting + 1));
  }
  return d;
}

}  // namespace

std::string scene_serialize(const CityScene& scene) {
  ojson v;
  v["kind"] = "scene";
  v["modelRevision"] = scene.modelRevision;
  v["extent"] = rect_to_json(scene.extent);
  v["worldScale"] = scene.worldScale;
  v["root"] = district_to_json(scene.root);
  return detail::dump_line(v);
}

CityScene scene_parse(std::string_view doc) {
  try {
    using namespace detail;
    ojson v = parse_object(doc);
    if (as_string(field(v, "kind"), "kind") != "scene") throw Error(Errc::SchemaViolation, "not a scene document");
    CityScene scene;
    scene.modelRevision = as_uint(field(v, "modelRevision"), "modelRevision");
    scene.extent = rect_from_json(field(v, "extent"));
    scene.worldScale = as_double(field(v, "worldScale"), "worldScale");
    scene.root = district_from_json(field(v, "root"), 0);
    return scene;
  } catch (const Error& e) {
    throw Error(Errc::MalformedScene, e.what());
  }
}

}  // namespace perfcity
