#include <random>

#include "doctest.h"
#include "perfcity/error.hpp"
#include "perfcity/service_core.hpp"
#include "support/generators.hpp"

using namespace perfcity;
using perfcity::testing::make_class;

namespace {

// Collects everything a session receives, decoded.
struct Recorder {
  std::vector<ServerMessage> messages;
  MessageSink sink() {
    return [this](const SharedMessage& m) { messages.push_back(decode_server_message(*m)); };
  }
  template <typename T>
  std::vector<T> all() const {
    std::vector<T> out;
    for (const auto& m : messages) {
      if (auto* v = std::get_if<T>(&m)) out.push_back(*v);
    }
    return out;
  }
};

ModelRecord ab_record() {
  ModelRecord r;
  r.classes = {make_class("app.A", "A", {"app"}, 3, 2), make_class("app.B", "B", {"app"}, 1, 1)};
  return r;
}

ServiceOptions opts(std::int64_t windowMs = 100, std::size_t history = 300) {
  ServiceOptions o;
  o.windowMs = windowMs;
  o.historyCapacity = history;
  return o;
}

}  // namespace

TEST_CASE("subscribe before any model gets the awaiting notice") {
  ServiceCore core(opts());
  Recorder rec;
  core.subscribe(rec.sink());
  REQUIRE(rec.messages.size() == 1);
  CHECK(std::get<NoticeMessage>(rec.messages[0]).message == kAwaitingModel);

  core.ingest_model(ab_record());
  REQUIRE(rec.messages.size() == 3);
  CHECK(std::holds_alternative<CityScene>(rec.messages[1]));
  CHECK(std::get<OrderMessage>(rec.messages[2]).classIds == std::vector<std::string>{"app.A", "app.B"});
}

TEST_CASE("subscribe after 5 buffered frames gets scene, order, 5 backfill frames, then live") {
  ServiceCore core(opts());
  core.ingest_model(ab_record());
  const auto src = core.open_source();
  for (int i = 0; i < 5; ++i) core.ingest_event(src, CallEvent{"app.A", 1, i * 100});
  core.ingest_event(src, CallEvent{"app.B", 1, 500});
  REQUIRE(core.history().size() == 5);

  Recorder rec;
  core.subscribe(rec.sink());
  REQUIRE(rec.messages.size() == 7);
  CHECK(std::holds_alternative<CityScene>(rec.messages[0]));
  CHECK(std::holds_alternative<OrderMessage>(rec.messages[1]));
  for (int i = 0; i < 5; ++i) CHECK(std::get<MetricFrame>(rec.messages[2 + i]).windowIndex == static_cast<std::uint64_t>(i));

  core.ingest_event(src, CallEvent{"app.A", 1, 650});
  REQUIRE(rec.messages.size() == 8);
  CHECK(std::get<MetricFrame>(rec.messages[7]) == MetricFrame{5, 500, {{"app.B", 1}}});
}

TEST_CASE("two sessions see identical frame sequences") {
  ServiceCore core(opts(50));
  core.ingest_model(ab_record());
  Recorder r1, r2;
  core.subscribe(r1.sink());
  const auto src = core.open_source();
  std::mt19937_64 rng(4);
  std::int64_t t = 0;
  for (int i = 0; i < 300; ++i) {
    t += rng() % 30;
    core.ingest_event(src, CallEvent{rng() % 2 ? "app.A" : "app.B", 1 + rng() % 4, t});
    if (i == 120) core.subscribe(r2.sink());
  }
  const auto f1 = r1.all<MetricFrame>();
  const auto f2 = r2.all<MetricFrame>();
  CHECK(f1.size() > 50);
  CHECK(f1 == f2);  // r2 got the earlier part as backfill
}

TEST_CASE("source timestamps are aligned onto the open window") {
  ServiceCore core(opts(100));
  core.ingest_model(ab_record());
  const auto s1 = core.open_source();
  core.ingest_event(s1, CallEvent{"app.A", 1, 0});
  core.ingest_event(s1, CallEvent{"app.A", 1, 350});  // closes windows 0..2
  CHECK(core.history().size() == 3);

  // A second source starting at its own t=0 lands in the open window (3).
  const auto s2 = core.open_source();
  CHECK(core.ingest_event(s2, CallEvent{"app.B", 2, 20}) == PushOutcome::Accepted);
  core.ingest_event(s2, CallEvent{"app.B", 1, 120});
  const auto h = core.history();
  REQUIRE(h.size() == 4);
  CHECK(h.frames().back().windowIndex == 3);
  CHECK(h.frames().back().counts == std::map<std::string, std::uint64_t>{{"app.A", 1}, {"app.B", 2}});
}

TEST_CASE("events before a model are counted and dropped") {
  ServiceCore core(opts());
  const auto src = core.open_source();
  CHECK(core.ingest_event(src, CallEvent{"app.A", 1, 0}) == PushOutcome::UnknownClass);
  CHECK(core.stats().eventsBeforeModel == 1);
  CHECK(core.history().empty());
}

TEST_CASE("ingest_line routes records and counts bad ones") {
  ServiceCore core(opts());
  const auto src = core.open_source();
  core.ingest_line(src, encode_record(WireRecord{ab_record()}));
  core.ingest_line(src, R"({"kind":"event","classId":"app.A","count":2,"timestampMs":5})");
  core.ingest_line(src, "not json");
  core.ingest_line(src, R"({"kind":"control","action":"pause"})");
  core.ingest_line(src, R"({"kind":"model","classes":[]})");
  const auto s = core.stats();
  CHECK(s.malformed == 1);
  CHECK(s.ignored == 1);
  CHECK(s.rejectedModels == 1);
  CHECK(s.events == 1);
  REQUIRE(core.model());
  CHECK(core.model()->revision() == 1);
}

TEST_CASE("idle timeout closes the open window") {
  ServiceCore core(opts(100));
  const auto t0 = Clock::now();
  core.ingest_model(ab_record(), t0);
  core.tick(t0 + std::chrono::milliseconds(150));
  CHECK(core.history().empty());
  core.tick(t0 + std::chrono::milliseconds(200));
  CHECK(core.history().size() == 1);
  core.tick(t0 + std::chrono::milliseconds(300));
  CHECK(core.history().size() == 1);
  core.tick(t0 + std::chrono::milliseconds(400));
  CHECK(core.history().size() == 2);
  for (const auto& f : core.history().frames()) CHECK(f.counts.empty());
}

TEST_CASE("flush emits the partial window") {
  ServiceCore core(opts(1000));
  core.ingest_model(ab_record());
  const auto src = core.open_source();
  core.ingest_event(src, CallEvent{"app.A", 4, 10});
  CHECK(core.history().empty());
  core.flush();
  REQUIRE(core.history().size() == 1);
  CHECK(core.history().frames().front().count("app.A") == 4);
}

TEST_CASE("selection is one shared state regardless of the view") {
  ServiceCore core(opts());
  core.ingest_model(ab_record());
  Recorder rb, rm;
  const auto sb = core.subscribe(rb.sink());
  const auto sm = core.subscribe(rm.sink());
  core.handle_client_line(sb, encode_client_request(SelectRequest{"app.A", ViewSource::Building}));
  core.handle_client_line(sm, encode_client_request(SelectRequest{"app.A", ViewSource::Mark}));
  CHECK(rb.all<SelectionState>() == rm.all<SelectionState>());
  CHECK(core.selection(sb)->selected == "app.A");

  core.select(sb, std::nullopt);
  CHECK_FALSE(core.selection(sb)->selected.has_value());
  CHECK(core.selection(sm)->selected == "app.A");  // per-session
}

TEST_CASE("select and hover reject unknown classes") {
  ServiceCore core(opts());
  core.ingest_model(ab_record());
  Recorder r;
  const auto s = core.subscribe(r.sink());
  try {
    core.select(s, std::string("app.Ghost"));
    FAIL("selected unknown class");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownClass);
  }
  core.handle_client_line(s, R"({"kind":"hover","classId":"app.Ghost"})");
  const auto errors = r.all<ErrorMessage>();
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].code == Errc::UnknownClass);
}

TEST_CASE("hover carries the display name and is cleared when the class disappears") {
  ServiceCore core(opts());
  core.ingest_model(ab_record());
  Recorder r;
  const auto s = core.subscribe(r.sink());
  CHECK(core.hover(s, std::string("app.A")) == HoverInfo{"app.A", "A"});
  CHECK(core.hover(s, std::nullopt) == HoverInfo{});
  core.hover(s, std::string("app.A"));
  core.select(s, std::string("app.A"));

  ModelRecord onlyB;
  onlyB.classes = {make_class("app.B", "B", {"app"}, 1, 1)};
  core.ingest_model(onlyB);
  CHECK(core.selection(s) == SelectionState{});
  const auto hovers = r.all<HoverInfo>();
  CHECK(hovers.back() == HoverInfo{});
  CHECK_THROWS_AS(core.select(s, std::string("app.A")), Error);
}

TEST_CASE("model update pushes the new scene before any later frame") {
  ServiceCore core(opts(100));
  core.ingest_model(ab_record());
  Recorder r;
  core.subscribe(r.sink());
  const auto src = core.open_source();
  core.ingest_event(src, CallEvent{"app.A", 1, 10});
  ModelRecord next = ab_record();
  next.classes.push_back(make_class("app.C", "C", {"app"}, 2, 2));
  core.ingest_model(next);
  core.ingest_event(src, CallEvent{"app.C", 1, 150});

  std::uint64_t sceneRev = 0;
  bool sawFrameAfterUpdate = false;
  for (const auto& m : r.messages) {
    if (auto* sc = std::get_if<CityScene>(&m)) sceneRev = sc->modelRevision;
    if (std::holds_alternative<MetricFrame>(m)) {
      CHECK(sceneRev == 2);
      sawFrameAfterUpdate = true;
    }
  }
  CHECK(sawFrameAfterUpdate);
  CHECK(core.scene()->modelRevision == 2);
}

TEST_CASE("cursor control per session") {
  ServiceCore core(opts(100, 4));
  core.ingest_model(ab_record());
  Recorder r;
  const auto s = core.subscribe(r.sink());
  const auto src = core.open_source();
  for (int i = 0; i <= 6; ++i) core.ingest_event(src, CallEvent{"app.A", 1, i * 100});
  // windows 0..5 closed, buffer holds 2..5
  CHECK(core.control(s, ControlRecord{ControlAction::Pause, {}}) == ViewCursor{CursorMode::Paused, 5});
  core.handle_client_line(s, R"({"kind":"control","action":"seek","arg":3})");
  CHECK(core.cursor(s) == ViewCursor{CursorMode::Paused, 3});
  core.handle_client_line(s, R"({"kind":"control","action":"seek","arg":0})");
  CHECK(r.all<ErrorMessage>().back().code == Errc::SeekOutOfRange);

  // Eviction clamps the paused cursor and tells the client.
  core.ingest_event(src, CallEvent{"app.A", 1, 750});  // closes 6, buffer 3..6
  core.ingest_event(src, CallEvent{"app.A", 1, 850});  // closes 7, buffer 4..7
  CHECK(core.cursor(s) == ViewCursor{CursorMode::Paused, 4});
  CHECK(r.all<ViewCursor>().back() == ViewCursor{CursorMode::Paused, 4});

  core.handle_client_line(s, R"({"kind":"control","action":"resume"})");
  CHECK(core.cursor(s) == ViewCursor{CursorMode::Live, 7});
}
