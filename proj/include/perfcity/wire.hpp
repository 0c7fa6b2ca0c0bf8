#pragma once

// Wire protocol v1: one JSON object per line, discriminated by "kind".

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "perfcity/model.hpp"

namespace perfcity {

struct CallEvent {
  std::string classId;
  std::uint64_t count = 1;       // >= 1
  std::int64_t timestampMs = 0;  // >= 0

  bool operator==(const CallEvent&) const = default;
};

// Per-window totals. Zero counts are never stored; absence means zero.
struct MetricFrame {
  std::uint64_t windowIndex = 0;
  std::int64_t windowStartMs = 0;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t count(const std::string& classId) const {
    auto it = counts.find(classId);
    return it == counts.end() ? 0 : it->second;
  }

  bool operator==(const MetricFrame&) const = default;
};

enum class ControlAction { Pause, Resume, Seek };

struct ControlRecord {
  ControlAction action = ControlAction::Pause;
  std::optional<std::uint64_t> arg;

  bool operator==(const ControlRecord&) const = default;
};

using WireRecord = std::variant<ModelRecord, CallEvent, MetricFrame, ControlRecord>;

std::string_view to_string(ControlAction action) noexcept;

// Throws Error{MalformedRecord | UnknownKind | SchemaViolation}.
WireRecord decode_record(std::string_view line);

// Single line, no trailing newline.
std::string encode_record(const WireRecord& record);

// Model files hold one model record, possibly pretty-printed over many lines.
ModelRecord read_model_file(const std::filesystem::path& path);
void write_model_file(const std::filesystem::path& path, const ModelRecord& model);

}  // namespace perfcity
