#include "perfcity/history.hpp"

#include <algorithm>

#include "perfcity/error.hpp"

namespace perfcity {

HistoryBuffer::HistoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw Error(Errc::InvalidConfig, "history capacity must be >= 1");
}

void HistoryBuffer::push(MetricFrame frame) {
  if (!frames_.empty() && frame.windowIndex <= frames_.back().windowIndex) {
    throw Error(Errc::OutOfOrderFrame, "window " + std::to_string(frame.windowIndex) + " after " +
                                           std::to_string(frames_.back().windowIndex));
  }
  frames_.push_back(std::move(frame));
  if (frames_.size() > capacity_) frames_.pop_front();
  ++totalPushed_;
}

std::optional<std::uint64_t> HistoryBuffer::newest_index() const {
  if (frames_.empty()) return std::nullopt;
  return frames_.back().windowIndex;
}

std::optional<std::uint64_t> HistoryBuffer::oldest_index() const {
  if (frames_.empty()) return std::nullopt;
  return frames_.front().windowIndex;
}

const MetricFrame* HistoryBuffer::find(std::uint64_t windowIndex) const {
  auto it = std::lower_bound(frames_.begin(), frames_.end(), windowIndex,
                             [](const MetricFrame& f, std::uint64_t w) { return f.windowIndex < w; });
  if (it == frames_.end() || it->windowIndex != windowIndex) return nullptr;
  return &*it;
}

std::string_view to_string(CursorMode mode) noexcept {
  return mode == CursorMode::Live ? "live" : "paused";
}

ViewCursor set_cursor(const ViewCursor& cursor, const HistoryBuffer& buffer, ControlAction action,
                      std::optional<std::uint64_t> arg) {
  switch (action) {
    case ControlAction::Pause:
      if (cursor.mode == CursorMode::Paused) return cursor;
      return ViewCursor{CursorMode::Paused, buffer.newest_index()};
    case ControlAction::Resume:
      return ViewCursor{CursorMode::Live, buffer.newest_index()};
    case ControlAction::Seek:
      if (!arg || !buffer.contains(*arg)) {
        throw Error(Errc::SeekOutOfRange,
                    arg ? "window " + std::to_string(*arg) + " is not buffered" : "seek without target");
      }
      return ViewCursor{CursorMode::Paused, *arg};
  }
  return cursor;
}

ViewCursor reconcile_cursor(const ViewCursor& cursor, const HistoryBuffer& buffer) {
  if (cursor.mode == CursorMode::Live) return ViewCursor{CursorMode::Live, buffer.newest_index()};
  auto oldest = buffer.oldest_index();
  if (!oldest) return ViewCursor{CursorMode::Paused, std::nullopt};
  if (!cursor.position || *cursor.position < *oldest) return ViewCursor{CursorMode::Paused, oldest};
  return cursor;
}

ScatterMatrix scatter_matrix(const HistoryBuffer& buffer, std::span<const std::string> order,
                             const ViewCursor& cursor) {
  ScatterMatrix m;
  m.rows.assign(order.begin(), order.end());
  std::vector<const MetricFrame*> visible;
  for (const auto& f : buffer.frames()) {
    if (cursor.mode == CursorMode::Paused && (!cursor.position || f.windowIndex > *cursor.position)) break;
    visible.push_back(&f);
    m.columns.push_back(f.windowIndex);
  }
  m.cells.assign(m.rows.size() * m.columns.size(), 0);
  for (std::size_t c = 0; c < visible.size(); ++c) {
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      m.cells[r * m.columns.size() + c] = visible[c]->count(m.rows[r]);
    }
  }
  return m;
}

}  // namespace perfcity
