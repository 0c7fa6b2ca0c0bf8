// perfcity-harness: synthetic workloads and trace replay.

#include <iostream>

#include "CLI11.hpp"
#include "perfcity/error.hpp"
#include "perfcity/harness.hpp"

int main(int argc, char** argv) {
  using namespace perfcity;

  CLI::App app{"Workload generator and trace replayer"};
  app.require_subcommand(1);

  std::string specPath, outPath;
  auto* gen = app.add_subcommand("gen", "Generate a trace from a workload spec");
  gen->add_option("--spec", specPath, "Workload spec file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", outPath, "Trace output file")->required();

  std::string tracePath, target;
  double speed = 1.0;
  auto* rep = app.add_subcommand("replay", "Replay a trace to a server's ingest address");
  rep->add_option("--trace", tracePath, "Trace file")->required()->check(CLI::ExistingFile);
  rep->add_option("--target", target, "Ingest address host:port")->required();
  rep->add_option("--speed", speed, "Playback speed factor")->check(CLI::PositiveNumber)->capture_default_str();

  std::size_t classes = 50, depth = 3;
  std::uint64_t seed = 1;
  std::string modelOut;
  auto* synth = app.add_subcommand("synth-model", "Write a random model file");
  synth->add_option("--classes", classes)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--depth", depth)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("--out", modelOut)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto trace = harness::generate_workload(harness::read_spec_file(specPath));
      harness::write_trace(outPath, trace);
      std::cout << "wrote " << trace.lines.size() << " records to " << outPath << '\n';
    } else if (*rep) {
      const auto report = harness::replay(harness::read_trace(tracePath), net::Endpoint::parse(target), speed);
      std::cout << "sent " << report.recordsSent << " records in " << report.wallTime.count() << " ms\n";
    } else if (*synth) {
      write_model_file(modelOut, harness::synthetic_model(seed, classes, depth));
      std::cout << "wrote " << classes << "-class model to " << modelOut << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "perfcity-harness: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
