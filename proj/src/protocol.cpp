#include "perfcity/protocol.hpp"

#include "wire_json.hpp"

namespace perfcity {
namespace {

using detail::ojson;

ojson optional_string(const std::optional<std::string>& s) { return s ? ojson(*s) : ojson(nullptr); }

std::optional<std::string> read_optional_string(const ojson& obj, const char* key) {
  if (const auto* v = detail::optional_field(obj, key)) return detail::as_string(*v, key);
  return std::nullopt;
}

ViewSource read_via(const ojson& obj) {
  const auto* v = detail::optional_field(obj, "via");
  if (!v) return ViewSource::Building;
  auto s = detail::as_string(*v, "via");
  if (s == "building") return ViewSource::Building;
  if (s == "mark") return ViewSource::Mark;
  throw Error(Errc::SchemaViolation, "'via' must be 'building' or 'mark'");
}

const char* via_name(ViewSource v) { return v == ViewSource::Building ? "building" : "mark"; }

struct RequestEncoder {
  ojson operator()(const SubscribeRequest&) const { return ojson{{"kind", "subscribe"}}; }
  ojson operator()(const ControlRecord& c) const {
    return ojson::parse(encode_record(WireRecord{c}));
  }
  ojson operator()(const SelectRequest& s) const {
    ojson v;
    v["kind"] = "select";
    v["classId"] = optional_string(s.classId);
    v["via"] = via_name(s.via);
    return v;
  }
  ojson operator()(const HoverRequest& h) const {
    ojson v;
    v["kind"] = "hover";
    v["classId"] = optional_string(h.classId);
    v["via"] = via_name(h.via);
    return v;
  }
};

struct MessageEncoder {
  std::string operator()(const CityScene& s) const { return scene_serialize(s); }
  std::string operator()(const MetricFrame& f) const { return encode_record(WireRecord{f}); }
  std::string operator()(const OrderMessage& o) const {
    ojson v;
    v["kind"] = "order";
    v["modelRevision"] = o.modelRevision;
    v["classIds"] = o.classIds;
    v["names"] = o.names;
    return detail::dump_line(v);
  }
  std::string operator()(const NoticeMessage& n) const {
    return detail::dump_line(ojson{{"kind", "notice"}, {"message", n.message}});
  }
  std::string operator()(const SelectionState& s) const {
    ojson v;
    v["kind"] = "selection";
    v["selected"] = optional_string(s.selected);
    v["hover"] = optional_string(s.hover);
    return detail::dump_line(v);
  }
  std::string operator()(const HoverInfo& h) const {
    ojson v;
    v["kind"] = "hover";
    v["classId"] = optional_string(h.classId);
    v["name"] = optional_string(h.name);
    return detail::dump_line(v);
  }
  std::string operator()(const ViewCursor& c) const {
    ojson v;
    v["kind"] = "cursor";
    v["mode"] = std::string(to_string(c.mode));
    v["position"] = c.position ? ojson(*c.position) : ojson(nullptr);
    return detail::dump_line(v);
  }
  std::string operator()(const ErrorMessage& e) const {
    ojson v;
    v["kind"] = "error";
    v["code"] = std::string(to_string(e.code));
    v["message"] = e.message;
    return detail::dump_line(v);
  }
};

}  // namespace

std::optional<Errc> errc_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Errc::IoError); ++i) {
    auto code = static_cast<Errc>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

std::string encode_client_request(const ClientRequest& request) {
  return detail::dump_line(std::visit(RequestEncoder{}, request));
}

ClientRequest decode_client_request(std::string_view line) {
  ojson obj = detail::parse_object(line);
  auto kind = detail::as_string(detail::field(obj, "kind"), "kind");
  if (kind == "subscribe") return SubscribeRequest{};
  if (kind == "control") return std::get<ControlRecord>(decode_record(line));
  if (kind == "select") return SelectRequest{read_optional_string(obj, "classId"), read_via(obj)};
  if (kind == "hover") return HoverRequest{read_optional_string(obj, "classId"), read_via(obj)};
  throw Error(Errc::UnknownKind, kind);
}

std::string encode_server_message(const ServerMessage& message) { return std::visit(MessageEncoder{}, message); }

ServerMessage decode_server_message(std::string_view line) {
  using namespace detail;
  ojson obj = parse_object(line);
  auto kind = as_string(field(obj, "kind"), "kind");
  if (kind == "scene") return scene_parse(line);
  if (kind == "frame") return std::get<MetricFrame>(decode_record(line));
  if (kind == "order") {
    OrderMessage o;
    o.modelRevision = as_uint(field(obj, "modelRevision"), "modelRevision");
    o.classIds = as_string_list(field(obj, "classIds"), "classIds");
    o.names = as_string_list(field(obj, "names"), "names");
    return o;
  }
  if (kind == "notice") return NoticeMessage{as_string(field(obj, "message"), "message")};
  if (kind == "selection") return SelectionState{read_optional_string(obj, "selected"), read_optional_string(obj, "hover")};
  if (kind == "hover") return HoverInfo{read_optional_string(obj, "classId"), read_optional_string(obj, "name")};
  if (kind == "cursor") {
    ViewCursor c;
    auto mode = as_string(field(obj, "mode"), "mode");
    if (mode == "live") {
      c.mode = CursorMode::Live;
    } else if (mode == "paused") {
      c.mode = CursorMode::Paused;
    } else {
      throw Error(Errc::SchemaViolation, "cursor mode must be 'live' or 'paused'");
    }
    if (const auto* p = optional_field(obj, "position")) c.position = as_uint(*p, "position");
    return c;
  }
  if (kind == "error") {
    auto name = as_string(field(obj, "code"), "code");
    auto code = errc_from_string(name);
    if (!code) throw Error(Errc::SchemaViolation, "unknown error code '" + name + "'");
    return ErrorMessage{*code, as_string(field(obj, "message"), "message")};
  }
  throw Error(Errc::UnknownKind, kind);
}

}  // namespace perfcity
