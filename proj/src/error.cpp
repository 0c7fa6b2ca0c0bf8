#include "perfcity/error.hpp"

namespace perfcity {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateClassId: return "DuplicateClassId";
    case Errc::OrphanClass: return "OrphanClass";
    case Errc::NegativeMetric: return "NegativeMetric";
    case Errc::EmptyModel: return "EmptyModel";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::OutOfOrderFrame: return "OutOfOrderFrame";
    case Errc::SeekOutOfRange: return "SeekOutOfRange";
    case Errc::MalformedScene: return "MalformedScene";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::BindFailure: return "BindFailure";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::ConnectionRefused: return "ConnectionRefused";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace perfcity
