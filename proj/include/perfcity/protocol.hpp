#pragma once

// Client channel messages. Frames and control records reuse the wire
// protocol schemas; the rest are specific to UI sessions.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "perfcity/error.hpp"
#include "perfcity/history.hpp"
#include "perfcity/layout.hpp"
#include "perfcity/wire.hpp"

namespace perfcity {

// Which view the user interacted with. Informational only: the resulting
// selection state never depends on it.
enum class ViewSource { Building, Mark };

struct SubscribeRequest {
  bool operator==(const SubscribeRequest&) const = default;
};

struct SelectRequest {
  std::optional<std::string> classId;
  ViewSource via = ViewSource::Building;
  bool operator==(const SelectRequest&) const = default;
};

struct HoverRequest {
  std::optional<std::string> classId;
  ViewSource via = ViewSource::Building;
  bool operator==(const HoverRequest&) const = default;
};

using ClientRequest = std::variant<SubscribeRequest, ControlRecord, SelectRequest, HoverRequest>;

struct SelectionState {
  std::optional<std::string> selected;
  std::optional<std::string> hover;
  bool operator==(const SelectionState&) const = default;
};

// Heads-up label content.
struct HoverInfo {
  std::optional<std::string> classId;
  std::optional<std::string> name;
  bool operator==(const HoverInfo&) const = default;
};

struct OrderMessage {
  std::uint64_t modelRevision = 0;
  std::vector<std::string> classIds;
  std::vector<std::string> names;
  bool operator==(const OrderMessage&) const = default;
};

struct NoticeMessage {
  std::string message;
  bool operator==(const NoticeMessage&) const = default;
};

struct ErrorMessage {
  Errc code = Errc::MalformedRecord;
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

using ServerMessage = std::variant<CityScene, OrderMessage, MetricFrame, NoticeMessage, SelectionState, HoverInfo,
                                   ViewCursor, ErrorMessage>;

inline constexpr std::string_view kAwaitingModel = "awaiting model";

std::string encode_client_request(const ClientRequest& request);
// Throws Error{MalformedRecord | UnknownKind | SchemaViolation}.
ClientRequest decode_client_request(std::string_view line);

std::string encode_server_message(const ServerMessage& message);
ServerMessage decode_server_message(std::string_view line);

std::optional<Errc> errc_from_string(std::string_view name);

}  // namespace perfcity
