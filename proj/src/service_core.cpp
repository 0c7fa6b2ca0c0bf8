#include "perfcity/service_core.hpp"

#include "perfcity/error.hpp"

namespace perfcity {
namespace {

SharedMessage share(std::string text) { return std::make_shared<const std::string>(std::move(text)); }

OrderMessage make_order(const SystemModel& model) {
  OrderMessage o;
  o.modelRevision = model.revision();
  o.classIds = class_order(model);
  o.names.reserve(o.classIds.size());
  for (const auto& id : o.classIds) o.names.push_back(model.find(id)->name);
  return o;
}

}  // namespace

ServiceCore::ServiceCore(ServiceOptions options)
    : options_(std::move(options)), aggregator_(options_.windowMs), history_(options_.historyCapacity) {
  options_.layout.validate();
}

SourceId ServiceCore::open_source() {
  std::lock_guard lock(mutex_);
  const SourceId id = nextSource_++;
  sources_.emplace(id, Source{});
  return id;
}

void ServiceCore::close_source(SourceId source) {
  std::lock_guard lock(mutex_);
  sources_.erase(source);
}

void ServiceCore::ingest_line(SourceId source, std::string_view line, Clock::time_point now) {
  if (line.empty()) return;
  WireRecord record;
  try {
    record = decode_record(line);
  } catch (const Error&) {
    std::lock_guard lock(mutex_);
    ++stats_.malformed;
    return;
  }
  if (auto* model = std::get_if<ModelRecord>(&record)) {
    try {
      ingest_model(*model, now);
    } catch (const Error&) {
      // counted in rejectedModels
    }
  } else if (auto* event = std::get_if<CallEvent>(&record)) {
    ingest_event(source, *event, now);
  } else {
    std::lock_guard lock(mutex_);
    ++stats_.records;
    ++stats_.ignored;
  }
}

void ServiceCore::ingest_model(const ModelRecord& record, Clock::time_point now) {
  std::lock_guard lock(mutex_);
  ++stats_.records;
  std::shared_ptr<const SystemModel> next;
  try {
    next = std::make_shared<const SystemModel>(model_ ? apply_model_update(*model_, record) : validate_model(record));
  } catch (const Error&) {
    ++stats_.rejectedModels;
    throw;
  }
  const bool first = !model_;
  model_ = std::move(next);
  aggregator_.retain(*model_);
  scene_ = std::make_shared<const CityScene>(layout_city(*model_, options_.layout));
  sceneMessage_ = share(encode_server_message(*scene_));
  orderMessage_ = share(encode_server_message(make_order(*model_)));
  if (first) lastAdvance_ = now;

  for (auto& [id, session] : sessions_) {
    // Scene first: nothing may refer to the new revision before it arrives.
    session.sink(sceneMessage_);
    session.sink(orderMessage_);
    auto& sel = session.selection;
    if (sel.hover && !model_->contains(*sel.hover)) {
      sel.hover.reset();
      send_locked(session, HoverInfo{});
    }
    if (sel.selected && !model_->contains(*sel.selected)) {
      sel.selected.reset();
      send_locked(session, sel);
    }
  }
}

PushOutcome ServiceCore::ingest_event(SourceId source, const CallEvent& event, Clock::time_point now) {
  std::lock_guard lock(mutex_);
  ++stats_.records;
  ++stats_.events;
  if (!model_) {
    ++stats_.eventsBeforeModel;
    return PushOutcome::UnknownClass;
  }
  auto& src = sources_[source];
  const std::int64_t windowMs = options_.windowMs;
  if (!src.offset) src.offset = aggregator_.open_window_start() - (event.timestampMs / windowMs) * windowMs;
  CallEvent mapped = event;
  mapped.timestampMs += *src.offset;

  std::vector<MetricFrame> closed;
  const auto outcome = aggregator_.push(mapped, *model_, closed);
  stats_.drops = aggregator_.tally();
  for (auto& f : closed) emit_locked(std::move(f));
  if (!closed.empty()) lastAdvance_ = now;
  return outcome;
}

void ServiceCore::tick(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  if (!model_) return;
  if (now - lastAdvance_ >= std::chrono::milliseconds(2 * options_.windowMs)) {
    emit_locked(aggregator_.close_current());
    lastAdvance_ = now;
  }
}

void ServiceCore::flush() {
  std::lock_guard lock(mutex_);
  if (!model_) return;
  emit_locked(aggregator_.close_current());
}

void ServiceCore::emit_locked(MetricFrame frame) {
  auto message = share(encode_server_message(frame));
  history_.push(std::move(frame));
  ++stats_.framesEmitted;
  for (auto& [id, session] : sessions_) {
    const ViewCursor before = session.cursor;
    session.cursor = reconcile_cursor(session.cursor, history_);
    session.sink(message);
    if (before.mode == CursorMode::Paused && session.cursor != before) send_locked(session, session.cursor);
  }
}

void ServiceCore::send_locked(Session& session, const ServerMessage& message) {
  session.sink(share(encode_server_message(message)));
}

void ServiceCore::send_bundle_locked(Session& session) {
  if (!model_) {
    send_locked(session, NoticeMessage{std::string(kAwaitingModel)});
    return;
  }
  session.sink(sceneMessage_);
  session.sink(orderMessage_);
  for (const auto& f : history_.frames()) send_locked(session, f);
}

SessionId ServiceCore::subscribe(MessageSink sink) {
  std::lock_guard lock(mutex_);
  const SessionId id = nextSession_++;
  Session& s = sessions_[id];
  s.sink = std::move(sink);
  s.cursor = reconcile_cursor(ViewCursor{}, history_);
  send_bundle_locked(s);
  return id;
}

void ServiceCore::unsubscribe(SessionId session) {
  std::lock_guard lock(mutex_);
  sessions_.erase(session);
}

ServiceCore::Session& ServiceCore::session_locked(SessionId id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::IoError, "no session " + std::to_string(id));
  return it->second;
}

const ClassInfo& ServiceCore::require_class_locked(const std::optional<std::string>& target) const {
  const ClassInfo* cls = model_ ? model_->find(*target) : nullptr;
  if (!cls) throw Error(Errc::UnknownClass, *target);
  return *cls;
}

SelectionState ServiceCore::select(SessionId session, const std::optional<std::string>& target) {
  std::lock_guard lock(mutex_);
  Session& s = session_locked(session);
  if (target) require_class_locked(target);
  s.selection.selected = target;
  send_locked(s, s.selection);
  return s.selection;
}

HoverInfo ServiceCore::hover(SessionId session, const std::optional<std::string>& target) {
  std::lock_guard lock(mutex_);
  Session& s = session_locked(session);
  HoverInfo info;
  if (target) {
    const ClassInfo& cls = require_class_locked(target);
    info = HoverInfo{cls.id, cls.name};
  }
  s.selection.hover = target;
  send_locked(s, info);
  return info;
}

ViewCursor ServiceCore::control(SessionId session, const ControlRecord& record) {
  std::lock_guard lock(mutex_);
  Session& s = session_locked(session);
  s.cursor = set_cursor(s.cursor, history_, record.action, record.arg);
  send_locked(s, s.cursor);
  return s.cursor;
}

void ServiceCore::handle_client_line(SessionId session, std::string_view line) {
  if (line.empty()) return;
  auto reply_error = [&](const Error& e) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session);
    if (it != sessions_.end()) send_locked(it->second, ErrorMessage{e.code(), e.what()});
  };
  try {
    const ClientRequest request = decode_client_request(line);
    if (const auto* c = std::get_if<ControlRecord>(&request)) {
      control(session, *c);
    } else if (const auto* sel = std::get_if<SelectRequest>(&request)) {
      select(session, sel->classId);
    } else if (const auto* h = std::get_if<HoverRequest>(&request)) {
      hover(session, h->classId);
    }
  } catch (const Error& e) {
    reply_error(e);
  }
}

std::shared_ptr<const SystemModel> ServiceCore::model() const {
  std::lock_guard lock(mutex_);
  return model_;
}

std::shared_ptr<const CityScene> ServiceCore::scene() const {
  std::lock_guard lock(mutex_);
  return scene_;
}

HistoryBuffer ServiceCore::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

IngestStats ServiceCore::stats() const {
  std::lock_guard lock(mutex_);
  IngestStats s = stats_;
  s.drops = aggregator_.tally();
  return s;
}

std::optional<SelectionState> ServiceCore::selection(SessionId session) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.selection;
}

std::optional<ViewCursor> ServiceCore::cursor(SessionId session) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) return std::nullopt;
  return it->second.cursor;
}

std::size_t ServiceCore::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace perfcity
