#pragma once

// Shared strict field accessors for the JSON-based codecs.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "perfcity/error.hpp"

namespace perfcity::detail {

using ojson = nlohmann::ordered_json;

inline const ojson& field(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::SchemaViolation, std::string("missing field '") + key + "'");
  return *it;
}

inline const ojson* optional_field(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  return (it == obj.end() || it->is_null()) ? nullptr : &*it;
}

inline std::uint64_t as_uint(const ojson& v, const char* what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    auto i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::uint64_t>(i);
  }
  throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be a non-negative integer");
}

// Signed integers; negative values are left for the caller to judge.
inline std::int64_t as_int(const ojson& v, const char* what) {
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u <= static_cast<std::uint64_t>(INT64_MAX)) return static_cast<std::int64_t>(u);
  } else if (v.is_number_integer()) {
    return v.get<std::int64_t>();
  }
  throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be an integer");
}

inline double as_double(const ojson& v, const char* what) {
  if (!v.is_number()) throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be a number");
  return v.get<double>();
}

inline std::string as_string(const ojson& v, const char* what) {
  if (!v.is_string()) throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> as_string_list(const ojson& v, const char* what) {
  if (!v.is_array()) throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_string(e, what));
  return out;
}

inline const ojson& as_object(const ojson& v, const char* what) {
  if (!v.is_object()) throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be an object");
  return v;
}

inline const ojson& as_array(const ojson& v, const char* what) {
  if (!v.is_array()) throw Error(Errc::SchemaViolation, std::string("'") + what + "' must be an array");
  return v;
}

// Parses one JSON object; syntax errors and non-object roots are MalformedRecord.
inline ojson parse_object(std::string_view text) {
  ojson doc = ojson::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::MalformedRecord, "invalid JSON");
  if (!doc.is_object()) throw Error(Errc::MalformedRecord, "record is not a JSON object");
  return doc;
}

inline std::string dump_line(const ojson& doc) {
  return doc.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

}  // namespace perfcity::detail

namespace perfcity {
struct ModelRecord;
}

namespace perfcity::detail {

// Model body without the "kind" discriminator check; used by the wire codec,
// model files and workload spec files.
ModelRecord model_from_json(const ojson& obj);
ojson model_to_json(const ModelRecord& model);

}  // namespace perfcity::detail
