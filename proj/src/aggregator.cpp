#include "perfcity/aggregator.hpp"

#include "perfcity/error.hpp"

namespace perfcity {

WindowAggregator::WindowAggregator(std::int64_t windowMs) : windowMs_(windowMs) {
  if (windowMs < 1) throw Error(Errc::InvalidConfig, "windowMs must be >= 1");
}

void WindowAggregator::advance() {
  open_.counts.clear();
  ++open_.windowIndex;
  open_.windowStartMs += windowMs_;
}

MetricFrame WindowAggregator::close_current() {
  MetricFrame done = open_;
  advance();
  return done;
}

PushOutcome WindowAggregator::push(const CallEvent& event, const SystemModel& model,
                                   std::vector<MetricFrame>& closed) {
  if (event.timestampMs < open_.windowStartMs) {
    ++tally_.lateEvents;
    tally_.lateCalls += event.count;
    return PushOutcome::Late;
  }
  const auto target = static_cast<std::uint64_t>(event.timestampMs / windowMs_);
  if (target - open_.windowIndex > kMaxLeapWindows) {
    ++tally_.farFutureEvents;
    tally_.farFutureCalls += event.count;
    return PushOutcome::FarFuture;
  }
  if (!model.contains(event.classId)) {
    // Unknown classes still move time forward: the timestamp is valid.
    while (open_.windowIndex < target) closed.push_back(close_current());
    ++tally_.unknownEvents;
    tally_.unknownCalls += event.count;
    return PushOutcome::UnknownClass;
  }
  while (open_.windowIndex < target) closed.push_back(close_current());
  open_.counts[event.classId] += event.count;
  return PushOutcome::Accepted;
}

void WindowAggregator::retain(const SystemModel& model) {
  for (auto it = open_.counts.begin(); it != open_.counts.end();) {
    if (model.contains(it->first)) {
      ++it;
    } else {
      ++tally_.unknownEvents;
      tally_.unknownCalls += it->second;
      it = open_.counts.erase(it);
    }
  }
}

std::vector<MetricFrame> window_aggregate(std::span<const CallEvent> events, std::int64_t windowMs,
                                          const SystemModel& model, std::optional<std::int64_t> endMs,
                                          DropTally* tally) {
  WindowAggregator agg(windowMs);
  std::vector<MetricFrame> frames;
  bool any = false;
  for (const auto& ev : events) {
    agg.push(ev, model, frames);
    any = true;
  }
  if (endMs) {
    while (agg.open_window_start() < *endMs) frames.push_back(agg.close_current());
  } else if (any) {
    frames.push_back(agg.close_current());
  }
  if (tally) *tally = agg.tally();
  return frames;
}

}  // namespace perfcity
