#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perfcity/model.hpp"
#include "perfcity/wire.hpp"

namespace perfcity {

inline constexpr std::int64_t kDefaultWindowMs = 1000;

// Counters for events that did not reach a frame.
struct DropTally {
  std::uint64_t lateEvents = 0;
  std::uint64_t lateCalls = 0;
  std::uint64_t unknownEvents = 0;
  std::uint64_t unknownCalls = 0;
  std::uint64_t farFutureEvents = 0;
  std::uint64_t farFutureCalls = 0;

  std::uint64_t dropped_events() const { return lateEvents + unknownEvents + farFutureEvents; }
  bool operator==(const DropTally&) const = default;
};

enum class PushOutcome { Accepted, Late, UnknownClass, FarFuture };

// Sums call events into consecutive fixed-length windows. Window k covers
// [k*windowMs, (k+1)*windowMs). Emitted frames are final; an event stamped
// before the open window is dropped as late.
class WindowAggregator {
 public:
  // Events more than this many windows ahead of the open one are rejected
  // instead of producing a burst of idle frames.
  static constexpr std::uint64_t kMaxLeapWindows = 1'000'000;

  explicit WindowAggregator(std::int64_t windowMs);

  // Closes every window that ends at or before the event's timestamp,
  // appending those frames (idle ones included) to `closed`.
  PushOutcome push(const CallEvent& event, const SystemModel& model, std::vector<MetricFrame>& closed);

  // Closes the open window unconditionally and opens the next one.
  MetricFrame close_current();

  // Drops open-window counts for classes no longer in `model`.
  void retain(const SystemModel& model);

  std::int64_t window_ms() const noexcept { return windowMs_; }
  std::uint64_t open_window() const noexcept { return open_.windowIndex; }
  std::int64_t open_window_start() const noexcept { return open_.windowStartMs; }
  bool open_window_empty() const noexcept { return open_.counts.empty(); }
  const DropTally& tally() const noexcept { return tally_; }

 private:
  void advance();

  std::int64_t windowMs_;
  MetricFrame open_;
  DropTally tally_;
};

// Batch form over a finite, time-ordered stream. Frames cover every window up
// to the one holding the last event, or up to `endMs` (exclusive) when given.
std::vector<MetricFrame> window_aggregate(std::span<const CallEvent> events, std::int64_t windowMs,
                                          const SystemModel& model, std::optional<std::int64_t> endMs = {},
                                          DropTally* tally = nullptr);

}  // namespace perfcity
