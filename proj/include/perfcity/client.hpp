#pragma once

// Headless client for the service's client channel.

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "perfcity/channel.hpp"
#include "perfcity/net.hpp"
#include "perfcity/protocol.hpp"

namespace perfcity {

class ClientConnection {
 public:
  enum class Transport { Line, WebSocket };

  // Connects and subscribes. Throws Error{ConnectionRefused | IoError}.
  static std::unique_ptr<ClientConnection> connect(const net::Endpoint& endpoint,
                                                   Transport transport = Transport::Line);

  void send(const ClientRequest& request);

  struct Received {
    enum class Status { Message, Timeout, Closed } status = Status::Closed;
    std::string text;
  };
  // Waits up to `timeout` for the next raw message.
  Received receive_raw(std::chrono::milliseconds timeout);
  // Decoded form; nullopt on timeout or close (see closed()).
  std::optional<ServerMessage> receive(std::chrono::milliseconds timeout);
  bool closed() const noexcept { return closed_; }

  void close();

 private:
  explicit ClientConnection(net::Socket socket);

  net::Socket socket_;
  net::ByteStream stream_;
  std::unique_ptr<MessageChannel> channel_;
  bool closed_ = false;
};

}  // namespace perfcity
