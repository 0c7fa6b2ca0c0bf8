#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perfcity/wire.hpp"

namespace perfcity {

// 300 columns: five minutes at the default one-second window.
inline constexpr std::size_t kDefaultHistoryCapacity = 300;

// Fixed-capacity FIFO of frames, oldest first. Pushing past capacity evicts
// the oldest frame.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity = kDefaultHistoryCapacity);

  // Throws Error{OutOfOrderFrame} unless frame.windowIndex > newest_index().
  void push(MetricFrame frame);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  std::uint64_t total_pushed() const noexcept { return totalPushed_; }
  const std::deque<MetricFrame>& frames() const noexcept { return frames_; }

  std::optional<std::uint64_t> newest_index() const;
  std::optional<std::uint64_t> oldest_index() const;
  bool contains(std::uint64_t windowIndex) const { return find(windowIndex) != nullptr; }
  const MetricFrame* find(std::uint64_t windowIndex) const;

 private:
  std::size_t capacity_;
  std::deque<MetricFrame> frames_;
  std::uint64_t totalPushed_ = 0;
};

enum class CursorMode { Live, Paused };

std::string_view to_string(CursorMode mode) noexcept;

// `position` is the windowIndex of the newest visible column; empty only
// while the buffer is empty.
struct ViewCursor {
  CursorMode mode = CursorMode::Live;
  std::optional<std::uint64_t> position;

  bool operator==(const ViewCursor&) const = default;
};

// pause freezes at the newest frame, resume returns to live, seek pauses at
// `arg`. Throws Error{SeekOutOfRange} when seeking outside the buffer.
ViewCursor set_cursor(const ViewCursor& cursor, const HistoryBuffer& buffer, ControlAction action,
                      std::optional<std::uint64_t> arg = {});

// Re-establishes the cursor invariants after the buffer changed: a live cursor
// follows the newest frame, a paused one is clamped to the oldest surviving.
ViewCursor reconcile_cursor(const ViewCursor& cursor, const HistoryBuffer& buffer);

struct ScatterMatrix {
  std::vector<std::string> rows;        // class ids, in the requested order
  std::vector<std::uint64_t> columns;   // windowIndex per column, oldest first
  std::vector<std::uint64_t> cells;     // row-major, rows x columns

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t column_count() const noexcept { return columns.size(); }
  std::uint64_t at(std::size_t row, std::size_t col) const { return cells[row * columns.size() + col]; }
  // Classes with no calls in a window get no mark.
  bool has_mark(std::size_t row, std::size_t col) const { return at(row, col) != 0; }
};

ScatterMatrix scatter_matrix(const HistoryBuffer& buffer, std::span<const std::string> order,
                             const ViewCursor& cursor);

}  // namespace perfcity
