#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <thread>

#include "doctest.h"
#include "perfcity/error.hpp"
#include "perfcity/harness.hpp"
#include "support/generators.hpp"

using namespace perfcity;
using perfcity::testing::make_class;

namespace {

harness::WorkloadSpec hot_cold_spec() {
  ModelRecord r;
  r.classes = {make_class("app.Hot", "Hot", {"app"}, 5, 5), make_class("app.Cold", "Cold", {"app"}, 1, 1)};
  harness::WorkloadSpec spec;
  spec.model = validate_model(r);
  spec.durationMs = 10'000;
  spec.seed = 1234;
  spec.hotClasses = {{"app.Hot", 100.0}};
  return spec;
}

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

// Accepts one connection and counts the lines it receives.
struct LineSink {
  net::TcpListener listener = net::TcpListener::bind({"127.0.0.1", 0});
  std::size_t lines = 0;
  std::jthread thread{[this] {
    if (auto s = listener.accept()) {
      net::ByteStream in(s->fd());
      while (in.read_line()) ++lines;
    }
  }};
  net::Endpoint endpoint() const { return {"127.0.0.1", listener.port()}; }
};

}  // namespace

TEST_CASE("poisson sampler moments") {
  std::mt19937_64 rng(17);
  for (double mean : {0.1, 2.5, 75.0}) {
    const int n = 100'000;
    double sum = 0, sumSq = 0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(harness::poisson_draw(rng, mean));
      sum += k;
      sumSq += k * k;
    }
    const double m = sum / n;
    const double var = sumSq / n - m * m;
    // Standard error of the mean is sqrt(mean / n); allow five of them.
    CHECK(std::abs(m - mean) < 5 * std::sqrt(mean / n));
    CHECK(var == doctest::Approx(mean).epsilon(0.03));
  }
  CHECK(harness::poisson_draw(rng, 0.0) == 0);
}

TEST_CASE("all-zero rates give a model-only trace") {
  auto spec = hot_cold_spec();
  spec.hotClasses.clear();
  const auto trace = harness::generate_workload(spec);
  REQUIRE(trace.lines.size() == 1);
  CHECK(harness::parse_trace(trace).events.empty());
}

TEST_CASE("generation is deterministic for a seed") {
  auto spec = hot_cold_spec();
  spec.baselineCallsPerSecond = 7;
  CHECK(harness::generate_workload(spec).lines == harness::generate_workload(spec).lines);
  auto other = spec;
  other.seed = 1235;
  CHECK(harness::generate_workload(other).lines != harness::generate_workload(spec).lines);
}

TEST_CASE("hot class at 100 calls/s for 10 s") {
  const auto parsed = harness::parse_trace(harness::generate_workload(hot_cold_spec()));
  const auto totals = perfcity::testing::totals_by_class(parsed.events);
  const auto hot = totals.at("app.Hot");
  CHECK(hot >= 700);
  CHECK(hot <= 1300);
  // Regression oracle for seed 1234.
  CHECK(hot == 1000);
  CHECK(parsed.events.size() == 647);
  CHECK(totals.count("app.Cold") == 0);
}

TEST_CASE("burst multiplies the rate inside its interval only") {
  auto spec = hot_cold_spec();
  spec.hotClasses.clear();
  spec.baselineCallsPerSecond = 20;
  spec.burst = harness::Burst{4000, 6000, "app.Cold", 10};
  const auto parsed = harness::parse_trace(harness::generate_workload(spec));
  std::uint64_t inside = 0, outside = 0, hotTotal = 0;
  for (const auto& e : parsed.events) {
    if (e.classId != "app.Cold") {
      hotTotal += e.count;
      continue;
    }
    (e.timestampMs >= 4000 && e.timestampMs < 6000 ? inside : outside) += e.count;
  }
  // Expected: inside 2 s * 200/s = 400, outside 8 s * 20/s = 160.
  CHECK(inside == doctest::Approx(400).epsilon(0.2));
  CHECK(outside == doctest::Approx(160).epsilon(0.3));
  CHECK(hotTotal == doctest::Approx(200).epsilon(0.3));
}

TEST_CASE("spec validation") {
  auto spec = hot_cold_spec();
  SUBCASE("negative rate") {
    spec.baselineCallsPerSecond = -1;
    CHECK(error_of([&] { spec.validate(); }) == Errc::InvalidSpec);
  }
  SUBCASE("unknown hot class") {
    spec.hotClasses.push_back({"nope", 1});
    CHECK(error_of([&] { spec.validate(); }) == Errc::InvalidSpec);
  }
  SUBCASE("burst outside duration") {
    spec.burst = harness::Burst{9000, 12000, "app.Hot", 2};
    CHECK(error_of([&] { spec.validate(); }) == Errc::InvalidSpec);
  }
  SUBCASE("bad tick") {
    spec.tickMs = 0;
    CHECK(error_of([&] { harness::generate_workload(spec); }) == Errc::InvalidSpec);
  }
}

TEST_CASE("spec files with inline and referenced models") {
  const auto dir = std::filesystem::temp_directory_path() / "perfcity_spec_test";
  std::filesystem::create_directories(dir);
  ModelRecord m;
  m.classes = {make_class("app.A", "A", {"app"}, 1, 1)};
  write_model_file(dir / "model.json", m);
  {
    std::ofstream(dir / "ref.json") << R"({"model":"model.json","durationMs":1000,"seed":3,
      "hotClasses":[{"classId":"app.A","meanCallsPerSecond":50}],
      "burst":{"startMs":0,"endMs":500,"classId":"app.A","multiplier":2}})";
    std::ofstream(dir / "inline.json")
        << R"({"model":{"classes":[{"id":"x.B","name":"B","packagePath":["x"],"numMethods":0,"numAttributes":0}]},
              "durationMs":2000,"seed":9,"baselineCallsPerSecond":3.5,"tickMs":20})";
    std::ofstream(dir / "bad.json") << R"({"model":"model.json","durationMs":1000,"seed":3,
      "hotClasses":[{"classId":"ghost","meanCallsPerSecond":5}]})";
    std::ofstream(dir / "broken.json") << R"({"model":)";
  }
  const auto ref = harness::read_spec_file(dir / "ref.json");
  CHECK(ref.model.contains("app.A"));
  REQUIRE(ref.burst.has_value());
  CHECK(ref.burst->multiplier == 2);
  const auto inl = harness::read_spec_file(dir / "inline.json");
  CHECK(inl.tickMs == 20);
  CHECK(inl.baselineCallsPerSecond == 3.5);
  CHECK(error_of([&] { harness::read_spec_file(dir / "bad.json"); }) == Errc::InvalidSpec);
  CHECK(error_of([&] { harness::read_spec_file(dir / "broken.json"); }) == Errc::InvalidSpec);
  std::filesystem::remove_all(dir);
}

TEST_CASE("trace files") {
  const auto trace = harness::generate_workload(hot_cold_spec());
  const auto path = std::filesystem::temp_directory_path() / "perfcity_trace_test.jsonl";
  harness::write_trace(path, trace);
  CHECK(harness::read_trace(path).lines == trace.lines);
  std::filesystem::remove(path);

  harness::TraceFile noModel{{R"({"kind":"event","classId":"a","count":1,"timestampMs":0})"}};
  CHECK(error_of([&] { harness::parse_trace(noModel); }) == Errc::MalformedTrace);
  harness::TraceFile backwards{{trace.lines[0], R"({"kind":"event","classId":"a","count":1,"timestampMs":5})",
                                R"({"kind":"event","classId":"a","count":1,"timestampMs":4})"}};
  CHECK(error_of([&] { harness::parse_trace(backwards); }) == Errc::MalformedTrace);
  harness::TraceFile garbage{{trace.lines[0], "garbage"}};
  CHECK(error_of([&] { harness::parse_trace(garbage); }) == Errc::MalformedTrace);
  CHECK(error_of([&] { harness::parse_trace({}); }) == Errc::MalformedTrace);
}

TEST_CASE("replay to an unreachable target") {
  std::uint16_t port = 0;
  {
    auto l = net::TcpListener::bind({"127.0.0.1", 0});
    port = l.port();
  }
  const auto trace = harness::generate_workload(hot_cold_spec());
  CHECK(error_of([&] { harness::replay(trace, {"127.0.0.1", port}, 1.0); }) == Errc::ConnectionRefused);
}

TEST_CASE("replay pacing scales with speed") {
  const auto trace = harness::generate_workload(hot_cold_spec());
  const double lastMs = static_cast<double>(harness::parse_trace(trace).events.back().timestampMs);

  SUBCASE("speed 10") {
    LineSink sink;
    const auto report = harness::replay(trace, sink.endpoint(), 10.0);
    CHECK(report.recordsSent == trace.lines.size());
    const double expected = lastMs / 10.0;
    CHECK(static_cast<double>(report.wallTime.count()) == doctest::Approx(expected).epsilon(0.10));
  }
  SUBCASE("speed 1") {
    LineSink sink;
    const auto report = harness::replay(trace, sink.endpoint(), 1.0);
    CHECK(static_cast<double>(report.wallTime.count()) == doctest::Approx(10'000.0).epsilon(0.10));
  }
}
