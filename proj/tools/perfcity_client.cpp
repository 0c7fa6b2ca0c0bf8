// perfcity-client: headless subscriber that prints the client stream.

#include <iostream>

#include "CLI11.hpp"
#include "perfcity/client.hpp"
#include "perfcity/error.hpp"

int main(int argc, char** argv) {
  using namespace perfcity;

  CLI::App app{"Headless client for perfcity-server"};
  std::string address = "127.0.0.1:7071";
  bool websocket = false;
  long maxFrames = -1;
  std::string select;
  app.add_option("--connect", address, "Server client address host:port")->capture_default_str();
  app.add_flag("--websocket", websocket, "Use the WebSocket transport");
  app.add_option("--frames", maxFrames, "Exit after this many frames (-1: run until closed)");
  app.add_option("--select", select, "Select this class after subscribing");
  CLI11_PARSE(app, argc, argv);

  try {
    auto client = ClientConnection::connect(
        net::Endpoint::parse(address),
        websocket ? ClientConnection::Transport::WebSocket : ClientConnection::Transport::Line);
    if (!select.empty()) client->send(SelectRequest{select, ViewSource::Building});
    long frames = 0;
    for (;;) {
      auto r = client->receive_raw(std::chrono::milliseconds(1000));
      if (r.status == ClientConnection::Received::Status::Closed) break;
      if (r.status == ClientConnection::Received::Status::Timeout) continue;
      std::cout << r.text << '\n';
      if (r.text.find("\"kind\":\"frame\"") != std::string::npos && maxFrames >= 0 && ++frames >= maxFrames) break;
    }
    client->close();
  } catch (const Error& e) {
    std::cerr << "perfcity-client: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
