#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perfcity {

enum class Errc {
  // model
  DuplicateClassId,
  OrphanClass,
  NegativeMetric,
  EmptyModel,
  // wire
  MalformedRecord,
  UnknownKind,
  SchemaViolation,
  // history
  OutOfOrderFrame,
  SeekOutOfRange,
  // layout
  MalformedScene,
  InvalidConfig,
  // service
  UnknownClass,
  BindFailure,
  // harness / net
  InvalidSpec,
  MalformedTrace,
  ConnectionRefused,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace perfcity
