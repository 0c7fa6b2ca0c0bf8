#include "perfcity/wire.hpp"

#include <fstream>
#include <sstream>

#include "perfcity/error.hpp"
#include "wire_json.hpp"

namespace perfcity {
namespace detail {
namespace {

PackageDecl package_from_json(const ojson& v, int depth) {
  if (depth > 256) throw Error(Errc::SchemaViolation, "package tree too deep");
  as_object(v, "packages[]");
  PackageDecl d;
  d.name = as_string(field(v, "name"), "name");
  if (const auto* cls = optional_field(v, "classes")) d.classes = as_string_list(*cls, "classes");
  if (const auto* ch = optional_field(v, "children")) {
    for (const auto& c : as_array(*ch, "children")) d.children.push_back(package_from_json(c, depth + 1));
  }
  return d;
}

ojson package_to_json(const PackageDecl& d) {
  ojson v;
  v["name"] = d.name;
  v["classes"] = d.classes;
  ojson children = ojson::array();
  for (const auto& c : d.children) children.push_back(package_to_json(c));
  v["children"] = std::move(children);
  return v;
}

}  // namespace

ModelRecord model_from_json(const ojson& obj) {
  ModelRecord rec;
  if (const auto* r = optional_field(obj, "revision")) rec.revision = as_uint(*r, "revision");
  if (const auto* pk = optional_field(obj, "packages")) {
    for (const auto& p : as_array(*pk, "packages")) rec.packages.push_back(package_from_json(p, 0));
  }
  for (const auto& c : as_array(field(obj, "classes"), "classes")) {
    as_object(c, "classes[]");
    ClassInfo info;
    info.id = as_string(field(c, "id"), "id");
    info.name = as_string(field(c, "name"), "name");
    info.packagePath = as_string_list(field(c, "packagePath"), "packagePath");
    info.numMethods = as_int(field(c, "numMethods"), "numMethods");
    info.numAttributes = as_int(field(c, "numAttributes"), "numAttributes");
    rec.classes.push_back(std::move(info));
  }
  return rec;
}

ojson model_to_json(const ModelRecord& model) {
  ojson v;
  v["kind"] = "model";
  if (model.revision) v["revision"] = *model.revision;
  ojson packages = ojson::array();
  for (const auto& p : model.packages) packages.push_back(package_to_json(p));
  v["packages"] = std::move(packages);
  ojson classes = ojson::array();
  for (const auto& c : model.classes) {
    ojson cv;
    cv["id"] = c.id;
    cv["name"] = c.name;
    cv["packagePath"] = c.packagePath;
    cv["numMethods"] = c.numMethods;
    cv["numAttributes"] = c.numAttributes;
    classes.push_back(std::move(cv));
  }
  v["classes"] = std::move(classes);
  return v;
}

}  // namespace detail

using detail::ojson;

std::string_view to_string(ControlAction action) noexcept {
  switch (action) {
    case ControlAction::Pause: return "pause";
    case ControlAction::Resume: return "resume";
    case ControlAction::Seek: return "seek";
  }
  return "pause";
}

namespace {

CallEvent event_from_json(const ojson& obj) {
  using namespace detail;
  CallEvent ev;
  ev.classId = as_string(field(obj, "classId"), "classId");
  ev.count = as_uint(field(obj, "count"), "count");
  if (ev.count < 1) throw Error(Errc::SchemaViolation, "'count' must be >= 1");
  ev.timestampMs = as_int(field(obj, "timestampMs"), "timestampMs");
  if (ev.timestampMs < 0) throw Error(Errc::SchemaViolation, "'timestampMs' must be >= 0");
  return ev;
}

MetricFrame frame_from_json(const ojson& obj) {
  using namespace detail;
  MetricFrame f;
  f.windowIndex = as_uint(field(obj, "windowIndex"), "windowIndex");
  f.windowStartMs = as_int(field(obj, "windowStartMs"), "windowStartMs");
  for (const auto& [id, n] : as_object(field(obj, "counts"), "counts").items()) {
    auto value = as_uint(n, "counts[]");
    if (value == 0) throw Error(Errc::SchemaViolation, "frame counts must not contain zero entries");
    f.counts.emplace(id, value);
  }
  return f;
}

ControlRecord control_from_json(const ojson& obj) {
  using namespace detail;
  ControlRecord c;
  auto action = as_string(field(obj, "action"), "action");
  if (action == "pause") {
    c.action = ControlAction::Pause;
  } else if (action == "resume") {
    c.action = ControlAction::Resume;
  } else if (action == "seek") {
    c.action = ControlAction::Seek;
  } else {
    throw Error(Errc::SchemaViolation, "unknown control action '" + action + "'");
  }
  if (const auto* arg = optional_field(obj, "arg")) c.arg = as_uint(*arg, "arg");
  if (c.action == ControlAction::Seek && !c.arg) throw Error(Errc::SchemaViolation, "seek requires 'arg'");
  return c;
}

struct Encoder {
  ojson operator()(const ModelRecord& m) const { return detail::model_to_json(m); }
  ojson operator()(const CallEvent& e) const {
    ojson v;
    v["kind"] = "event";
    v["classId"] = e.classId;
    v["count"] = e.count;
    v["timestampMs"] = e.timestampMs;
    return v;
  }
  ojson operator()(const MetricFrame& f) const {
    ojson v;
    v["kind"] = "frame";
    v["windowIndex"] = f.windowIndex;
    v["windowStartMs"] = f.windowStartMs;
    ojson counts = ojson::object();
    for (const auto& [id, n] : f.counts) counts[id] = n;
    v["counts"] = std::move(counts);
    return v;
  }
  ojson operator()(const ControlRecord& c) const {
    ojson v;
    v["kind"] = "control";
    v["action"] = std::string(to_string(c.action));
    if (c.arg) v["arg"] = *c.arg;
    return v;
  }
};

}  // namespace

WireRecord decode_record(std::string_view line) {
  if (line.find('\n') != std::string_view::npos) {
    throw Error(Errc::MalformedRecord, "embedded newline");
  }
  ojson obj = detail::parse_object(line);
  auto kind = detail::as_string(detail::field(obj, "kind"), "kind");
  if (kind == "model") return detail::model_from_json(obj);
  if (kind == "event") return event_from_json(obj);
  if (kind == "frame") return frame_from_json(obj);
  if (kind == "control") return control_from_json(obj);
  throw Error(Errc::UnknownKind, kind);
}

std::string encode_record(const WireRecord& record) {
  return detail::dump_line(std::visit(Encoder{}, record));
}

ModelRecord read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ojson obj = detail::parse_object(ss.str());
  auto kind = detail::as_string(detail::field(obj, "kind"), "kind");
  if (kind != "model") throw Error(Errc::UnknownKind, "model file holds a '" + kind + "' record");
  return detail::model_from_json(obj);
}

void write_model_file(const std::filesystem::path& path, const ModelRecord& model) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << detail::model_to_json(model).dump(2) << '\n';
}

}  // namespace perfcity
