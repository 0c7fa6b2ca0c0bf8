#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "perfcity/aggregator.hpp"
#include "perfcity/history.hpp"
#include "perfcity/layout.hpp"
#include "perfcity/model.hpp"
#include "perfcity/protocol.hpp"

namespace perfcity {

using Clock = std::chrono::steady_clock;
using SessionId = std::uint64_t;
using SourceId = std::uint64_t;

// Encoded message shared by every session that receives it.
using SharedMessage = std::shared_ptr<const std::string>;
// Called with the core lock held; must not block or call back into the core.
using MessageSink = std::function<void(const SharedMessage&)>;

struct ServiceOptions {
  std::int64_t windowMs = kDefaultWindowMs;
  std::size_t historyCapacity = kDefaultHistoryCapacity;
  LayoutConfig layout;
};

struct IngestStats {
  std::uint64_t records = 0;
  std::uint64_t events = 0;
  std::uint64_t malformed = 0;       // undecodable lines
  std::uint64_t ignored = 0;         // well-formed but not ingest kinds
  std::uint64_t rejectedModels = 0;  // failed validation; model kept
  std::uint64_t eventsBeforeModel = 0;
  std::uint64_t framesEmitted = 0;
  DropTally drops;
};

// All server state and logic, without sockets or threads. Every public
// member is thread-safe.
//
// Event timestamps are relative to their source. The first event of each
// source is aligned onto the open window, so a replayed trace keeps its own
// window boundaries regardless of when it connects.
class ServiceCore {
 public:
  explicit ServiceCore(ServiceOptions options);

  const ServiceOptions& options() const noexcept { return options_; }

  // --- ingest
  SourceId open_source();
  void close_source(SourceId source);
  // Decodes and applies one wire line. Malformed lines are counted, not thrown.
  void ingest_line(SourceId source, std::string_view line, Clock::time_point now = Clock::now());
  // Throws the validation error after counting it; the model is unchanged.
  void ingest_model(const ModelRecord& record, Clock::time_point now = Clock::now());
  PushOutcome ingest_event(SourceId source, const CallEvent& event, Clock::time_point now = Clock::now());

  // Closes the open window when nothing has advanced time for 2 x windowMs.
  void tick(Clock::time_point now = Clock::now());
  // Emits the open window as a final frame (shutdown).
  void flush();

  // --- sessions
  // Delivers the subscription bundle synchronously through `sink`: scene,
  // order, backfill frames; or an "awaiting model" notice.
  SessionId subscribe(MessageSink sink);
  void unsubscribe(SessionId session);
  // Decodes and dispatches one client message; failures become error messages.
  void handle_client_line(SessionId session, std::string_view line);

  // Throw Error{UnknownClass}.
  SelectionState select(SessionId session, const std::optional<std::string>& target);
  HoverInfo hover(SessionId session, const std::optional<std::string>& target);
  // Throws Error{SeekOutOfRange}.
  ViewCursor control(SessionId session, const ControlRecord& record);

  // --- observation
  std::shared_ptr<const SystemModel> model() const;
  std::shared_ptr<const CityScene> scene() const;
  HistoryBuffer history() const;
  IngestStats stats() const;
  std::optional<SelectionState> selection(SessionId session) const;
  std::optional<ViewCursor> cursor(SessionId session) const;
  std::size_t session_count() const;

 private:
  struct Session {
    MessageSink sink;
    ViewCursor cursor;
    SelectionState selection;
  };
  struct Source {
    std::optional<std::int64_t> offset;
  };

  void emit_locked(MetricFrame frame);
  void send_locked(Session& session, const ServerMessage& message);
  void send_bundle_locked(Session& session);
  Session& session_locked(SessionId id);
  const ClassInfo& require_class_locked(const std::optional<std::string>& target) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::shared_ptr<const SystemModel> model_;
  std::shared_ptr<const CityScene> scene_;
  SharedMessage sceneMessage_;
  SharedMessage orderMessage_;
  WindowAggregator aggregator_;
  HistoryBuffer history_;
  IngestStats stats_;
  Clock::time_point lastAdvance_{};
  std::map<SessionId, Session> sessions_;
  std::map<SourceId, Source> sources_;
  SessionId nextSession_ = 1;
  SourceId nextSource_ = 1;
};

}  // namespace perfcity
