#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "perfcity/model.hpp"
#include "perfcity/net.hpp"
#include "perfcity/wire.hpp"

namespace perfcity::harness {

struct HotClass {
  std::string classId;
  double meanCallsPerSecond = 0;
};

struct Burst {
  std::int64_t startMs = 0;
  std::int64_t endMs = 0;
  std::string classId;
  double multiplier = 1;
};

struct WorkloadSpec {
  SystemModel model;
  std::int64_t durationMs = 0;
  std::uint64_t seed = 0;
  std::vector<HotClass> hotClasses;
  double baselineCallsPerSecond = 0;
  std::optional<Burst> burst;
  // Calls are drawn per class per tick and batched into one event.
  std::int64_t tickMs = 10;

  // Throws Error{InvalidSpec}.
  void validate() const;
};

// JSON spec file; "model" is either an inline model record or a path to a
// model file relative to the spec. Throws Error{InvalidSpec | IoError}.
WorkloadSpec read_spec_file(const std::filesystem::path& path);

// Model record line first, then events in non-decreasing timestamp order.
struct TraceFile {
  std::vector<std::string> lines;
};

TraceFile read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const TraceFile& trace);

struct ParsedTrace {
  ModelRecord model;
  std::vector<CallEvent> events;
};
// Throws Error{MalformedTrace}.
ParsedTrace parse_trace(const TraceFile& trace);

// Deterministic for a given spec: per tick and class (in class order) the
// call count is a Poisson draw with mean rate * tickMs / 1000, the burst
// class's rate multiplied inside its interval.
TraceFile generate_workload(const WorkloadSpec& spec);

// Knuth's product method; means above 30 are split into pieces.
// Uses only the raw 64-bit output of `rng` so results are portable.
template <typename Engine>
std::uint64_t poisson_draw(Engine& rng, double mean);

struct ReplayReport {
  std::uint64_t recordsSent = 0;
  std::chrono::milliseconds wallTime{0};
};

// Sends the trace to an ingest endpoint, pacing events by timestamp / speed.
// Throws Error{MalformedTrace | ConnectionRefused | IoError}.
ReplayReport replay(const TraceFile& trace, const net::Endpoint& target, double speed);

// Seeded random package tree for demos and tests: `classCount` classes spread
// over packages nested at most `maxDepth` deep.
ModelRecord synthetic_model(std::uint64_t seed, std::size_t classCount, std::size_t maxDepth);

}  // namespace perfcity::harness

#include "perfcity/harness_impl.hpp"
