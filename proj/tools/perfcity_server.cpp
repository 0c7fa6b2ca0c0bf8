// perfcity-server: live ingest + city/scatter streaming service.

#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "perfcity/error.hpp"
#include "perfcity/server.hpp"
#include "perfcity/wire.hpp"

int main(int argc, char** argv) {
  using namespace perfcity;

  CLI::App app{"Live performance city server"};
  std::string ingest = "127.0.0.1:7070";
  std::string serve = "127.0.0.1:7071";
  ServerConfig cfg;
  double scale = cfg.layout.scale;
  double colorRef = cfg.layout.colorRef;
  std::string colorScale = std::string(to_string(cfg.layout.colorScale));
  std::string modelFile;

  // Flags win over PERFCITY_* environment variables, which win over defaults.
  app.add_option("--ingest", ingest, "Profiler/harness listen address host:port")->envname("PERFCITY_INGEST")->capture_default_str();
  app.add_option("--serve", serve, "UI client listen address host:port")->envname("PERFCITY_SERVE")->capture_default_str();
  app.add_option("--window-ms", cfg.windowMs, "Aggregation window length")->envname("PERFCITY_WINDOW_MS")->capture_default_str();
  app.add_option("--history", cfg.historyCapacity, "History buffer size in frames")->envname("PERFCITY_HISTORY")->capture_default_str();
  app.add_option("--scale", scale, "World size of the longest scene side")->envname("PERFCITY_SCALE")->capture_default_str();
  app.add_option("--color-ref", colorRef, "Calls per window shown at full red")->envname("PERFCITY_COLOR_REF")->capture_default_str();
  app.add_option("--color-scale", colorScale, "linear or log")
      ->envname("PERFCITY_COLOR_SCALE")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();
  app.add_option("--model", modelFile, "Model file to load at startup")->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.ingestAddress = net::Endpoint::parse(ingest);
    cfg.clientAddress = net::Endpoint::parse(serve);
    cfg.layout.scale = scale;
    cfg.layout.colorRef = colorRef;
    cfg.layout.colorScale = color_scale_from_string(colorScale);

    // Block termination signals before any thread starts so sigwait sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Server server(cfg);
    if (!modelFile.empty()) server.core().ingest_model(read_model_file(modelFile));
    server.start();
    std::cerr << "perfcity-server: ingest on " << cfg.ingestAddress.host << ':' << server.ingest_port()
              << ", clients on " << cfg.clientAddress.host << ':' << server.client_port() << '\n';

    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "perfcity-server: shutting down\n";
    server.stop();
    const auto stats = server.core().stats();
    std::cerr << "perfcity-server: " << stats.framesEmitted << " frames, " << stats.events << " events, "
              << stats.drops.dropped_events() << " dropped, " << stats.malformed << " malformed\n";
  } catch (const Error& e) {
    std::cerr << "perfcity-server: " << e.what() << '\n';
    return e.code() == Errc::BindFailure ? 3 : 2;
  }
  return 0;
}
