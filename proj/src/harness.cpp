#include "perfcity/harness.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "perfcity/error.hpp"
#include "wire_json.hpp"

namespace perfcity::harness {

void WorkloadSpec::validate() const {
  auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0; };
  if (durationMs < 0) throw Error(Errc::InvalidSpec, "durationMs must be >= 0");
  if (tickMs < 1) throw Error(Errc::InvalidSpec, "tickMs must be >= 1");
  if (!rate_ok(baselineCallsPerSecond)) throw Error(Errc::InvalidSpec, "baselineCallsPerSecond must be >= 0");
  for (const auto& h : hotClasses) {
    if (!model.contains(h.classId)) throw Error(Errc::InvalidSpec, "hot class " + h.classId + " not in model");
    if (!rate_ok(h.meanCallsPerSecond)) throw Error(Errc::InvalidSpec, "rate for " + h.classId + " must be >= 0");
  }
  if (burst) {
    if (!model.contains(burst->classId)) throw Error(Errc::InvalidSpec, "burst class " + burst->classId + " not in model");
    if (burst->startMs < 0 || burst->endMs < burst->startMs || burst->endMs > durationMs) {
      throw Error(Errc::InvalidSpec, "burst interval must lie within [0, durationMs]");
    }
    if (!rate_ok(burst->multiplier)) throw Error(Errc::InvalidSpec, "burst multiplier must be >= 0");
  }
}

WorkloadSpec read_spec_file(const std::filesystem::path& path) {
  using namespace perfcity::detail;
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    ojson doc = parse_object(ss.str());
    const ojson& m = field(doc, "model");
    ModelRecord record;
    if (m.is_string()) {
      record = read_model_file(path.parent_path() / m.get<std::string>());
    } else {
      record = model_from_json(as_object(m, "model"));
    }
    WorkloadSpec spec;
    spec.model = validate_model(record);
    spec.durationMs = as_int(field(doc, "durationMs"), "durationMs");
    spec.seed = as_uint(field(doc, "seed"), "seed");
    if (const auto* t = optional_field(doc, "tickMs")) spec.tickMs = as_int(*t, "tickMs");
    if (const auto* b = optional_field(doc, "baselineCallsPerSecond")) {
      spec.baselineCallsPerSecond = as_double(*b, "baselineCallsPerSecond");
    }
    if (const auto* hot = optional_field(doc, "hotClasses")) {
      for (const auto& h : as_array(*hot, "hotClasses")) {
        as_object(h, "hotClasses[]");
        spec.hotClasses.push_back(
            {as_string(field(h, "classId"), "classId"), as_double(field(h, "meanCallsPerSecond"), "meanCallsPerSecond")});
      }
    }
    if (const auto* b = optional_field(doc, "burst")) {
      as_object(*b, "burst");
      spec.burst = Burst{as_int(field(*b, "startMs"), "startMs"), as_int(field(*b, "endMs"), "endMs"),
                         as_string(field(*b, "classId"), "classId"), as_double(field(*b, "multiplier"), "multiplier")};
    }
    spec.validate();
    return spec;
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidSpec || e.code() == Errc::IoError) throw;
    throw Error(Errc::InvalidSpec, e.what());
  }
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  TraceFile trace;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) trace.lines.push_back(std::move(line));
  }
  return trace;
}

void write_trace(const std::filesystem::path& path, const TraceFile& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  for (const auto& l : trace.lines) out << l << '\n';
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

ParsedTrace parse_trace(const TraceFile& trace) {
  if (trace.lines.empty()) throw Error(Errc::MalformedTrace, "empty trace");
  ParsedTrace parsed;
  try {
    auto first = decode_record(trace.lines.front());
    auto* model = std::get_if<ModelRecord>(&first);
    if (!model) throw Error(Errc::MalformedTrace, "first record must be a model record");
    parsed.model = std::move(*model);
    for (std::size_t i = 1; i < trace.lines.size(); ++i) {
      auto rec = decode_record(trace.lines[i]);
      auto* ev = std::get_if<CallEvent>(&rec);
      if (!ev) throw Error(Errc::MalformedTrace, "line " + std::to_string(i + 1) + " is not an event");
      if (!parsed.events.empty() && ev->timestampMs < parsed.events.back().timestampMs) {
        throw Error(Errc::MalformedTrace, "line " + std::to_string(i + 1) + ": timestamps go backwards");
      }
      parsed.events.push_back(std::move(*ev));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedTrace) throw;
    throw Error(Errc::MalformedTrace, e.what());
  }
  return parsed;
}

TraceFile generate_workload(const WorkloadSpec& spec) {
  spec.validate();
  const auto order = class_order(spec.model);
  std::map<std::string, double> hot;
  for (const auto& h : spec.hotClasses) hot[h.classId] = h.meanCallsPerSecond;
  std::vector<double> rates;
  rates.reserve(order.size());
  for (const auto& id : order) {
    auto it = hot.find(id);
    rates.push_back(it == hot.end() ? spec.baselineCallsPerSecond : it->second);
  }

  TraceFile trace;
  trace.lines.push_back(encode_record(WireRecord{spec.model.to_record()}));
  std::mt19937_64 rng(spec.seed);
  const double ticksPerSecond = 1000.0 / static_cast<double>(spec.tickMs);
  for (std::int64_t t = 0; t < spec.durationMs; t += spec.tickMs) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      double rate = rates[i];
      if (spec.burst && order[i] == spec.burst->classId && t >= spec.burst->startMs && t < spec.burst->endMs) {
        rate *= spec.burst->multiplier;
      }
      const std::uint64_t calls = poisson_draw(rng, rate / ticksPerSecond);
      if (calls > 0) trace.lines.push_back(encode_record(WireRecord{CallEvent{order[i], calls, t}}));
    }
  }
  return trace;
}

ReplayReport replay(const TraceFile& trace, const net::Endpoint& target, double speed) {
  if (!(speed > 0) || !std::isfinite(speed)) throw Error(Errc::InvalidConfig, "speed must be > 0");
  const ParsedTrace parsed = parse_trace(trace);
  net::Socket socket = net::connect_to(target);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  ReplayReport report;
  socket.write_all(trace.lines.front() + "\n");
  ++report.recordsSent;

  std::string batch;
  std::size_t i = 0;
  const auto& events = parsed.events;
  while (i < events.size()) {
    const std::int64_t ts = events[i].timestampMs;
    batch.clear();
    for (; i < events.size() && events[i].timestampMs == ts; ++i) {
      batch += trace.lines[i + 1];
      batch += '\n';
      ++report.recordsSent;
    }
    const auto due = start + std::chrono::duration_cast<clock::duration>(
                                 std::chrono::duration<double, std::milli>(static_cast<double>(ts) / speed));
    std::this_thread::sleep_until(due);
    socket.write_all(batch);
  }
  report.wallTime = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
  return report;
}

ModelRecord synthetic_model(std::uint64_t seed, std::size_t classCount, std::size_t maxDepth) {
  if (classCount == 0 || maxDepth == 0) throw Error(Errc::InvalidSpec, "need at least one class and depth 1");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<std::vector<std::string>> packages;
  const std::size_t packageCount = std::max<std::size_t>(1, classCount / 6);
  for (std::size_t p = 0; p < packageCount; ++p) {
    std::vector<std::string> path;
    if (!packages.empty() && pick(3) != 0) {
      path = packages[pick(packages.size())];
      if (path.size() >= maxDepth) path.resize(maxDepth - 1);
    }
    path.push_back("p" + std::to_string(p));
    packages.push_back(std::move(path));
  }

  ModelRecord rec;
  for (std::size_t c = 0; c < classCount; ++c) {
    ClassInfo info;
    info.packagePath = packages[pick(packages.size())];
    info.name = "C" + std::to_string(c);
    std::string id;
    for (const auto& seg : info.packagePath) id += seg + ".";
    info.id = id + info.name;
    info.numMethods = static_cast<std::int64_t>(pick(41));
    info.numAttributes = static_cast<std::int64_t>(pick(26));
    rec.classes.push_back(std::move(info));
  }
  return rec;
}

}  // namespace perfcity::harness
