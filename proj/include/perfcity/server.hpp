#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "perfcity/net.hpp"
#include "perfcity/service_core.hpp"

namespace perfcity {

struct ServerConfig {
  net::Endpoint ingestAddress{"127.0.0.1", 7070};
  net::Endpoint clientAddress{"127.0.0.1", 7071};
  std::int64_t windowMs = kDefaultWindowMs;
  std::size_t historyCapacity = kDefaultHistoryCapacity;
  LayoutConfig layout;
  // Per-session outbound backlog; a client that falls further behind is dropped.
  std::size_t maxQueuedMessages = 200'000;

  // Throws Error{InvalidConfig}.
  void validate() const;
};

// Ingest listener (wire protocol lines), client listener (line or WebSocket
// sessions), and an idle-timeout ticker around one ServiceCore.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds both listeners before spawning anything. Throws Error{BindFailure}.
  void start();
  // Stops accepting, flushes the open window as a final frame, delivers what
  // is queued, then closes every connection. Idempotent.
  void stop();

  std::uint16_t ingest_port() const noexcept { return ingestPort_; }
  std::uint16_t client_port() const noexcept { return clientPort_; }
  ServiceCore& core() noexcept { return core_; }
  const ServerConfig& config() const noexcept { return config_; }

 private:
  struct IngestConn;
  struct ClientConn;

  void ingest_accept_loop();
  void client_accept_loop();
  void tick_loop(std::stop_token stop);
  void serve_ingest(IngestConn& conn);
  void serve_client(ClientConn& conn);
  void reap_finished();

  ServerConfig config_;
  ServiceCore core_;
  std::optional<net::TcpListener> ingestListener_;
  std::optional<net::TcpListener> clientListener_;
  std::uint16_t ingestPort_ = 0;
  std::uint16_t clientPort_ = 0;
  std::atomic<bool> stopping_{false};
  bool started_ = false;
  bool stopped_ = false;

  std::mutex connMutex_;
  std::list<std::unique_ptr<IngestConn>> ingestConns_;
  std::list<std::unique_ptr<ClientConn>> clientConns_;

  std::jthread ingestAcceptThread_;
  std::jthread clientAcceptThread_;
  std::jthread tickThread_;
};

}  // namespace perfcity
