#pragma once

// Message-oriented duplex channels over a connected socket: newline-delimited
// text, or RFC 6455 WebSocket text frames for browser clients.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "perfcity/net.hpp"

namespace perfcity {

class MessageChannel {
 public:
  virtual ~MessageChannel() = default;

  // Next complete message; nullopt once the peer has closed.
  virtual std::optional<std::string> receive() = 0;
  // Safe to call concurrently with receive() and with other send() calls.
  virtual void send(std::string_view message) = 0;
  // Polite close (WebSocket close frame); the socket itself stays open.
  virtual void close() {}
};

class LineChannel final : public MessageChannel {
 public:
  LineChannel(const net::Socket& socket, net::ByteStream& stream) : socket_(socket), stream_(stream) {}

  std::optional<std::string> receive() override { return stream_.read_line(); }
  void send(std::string_view message) override;

 private:
  const net::Socket& socket_;
  net::ByteStream& stream_;
  std::mutex writeMutex_;
};

namespace ws {

enum class Opcode : unsigned char { Continuation = 0x0, Text = 0x1, Binary = 0x2, Close = 0x8, Ping = 0x9, Pong = 0xA };

// Sec-WebSocket-Accept for a given Sec-WebSocket-Key.
std::string accept_key(std::string_view clientKey);

// Client frames must be masked, server frames must not be.
std::string encode_frame(Opcode op, std::string_view payload, const unsigned char* mask = nullptr);

struct Frame {
  bool fin = true;
  Opcode op = Opcode::Text;
  std::string payload;  // unmasked
};

// nullopt on EOF. Throws Error{IoError} on protocol violations.
std::optional<Frame> read_frame(net::ByteStream& stream, std::size_t maxPayload = net::ByteStream::kMaxLine);

// Reads the HTTP upgrade request and answers 101. Throws Error{IoError}.
void server_handshake(const net::Socket& socket, net::ByteStream& stream);
void client_handshake(const net::Socket& socket, net::ByteStream& stream, std::string_view host,
                      std::string_view path = "/");

}  // namespace ws

class WebSocketChannel final : public MessageChannel {
 public:
  enum class Role { Server, Client };

  WebSocketChannel(const net::Socket& socket, net::ByteStream& stream, Role role)
      : socket_(socket), stream_(stream), role_(role) {}

  std::optional<std::string> receive() override;
  void send(std::string_view message) override;
  void close() override;

 private:
  void send_frame(ws::Opcode op, std::string_view payload);

  const net::Socket& socket_;
  net::ByteStream& stream_;
  Role role_;
  std::mutex writeMutex_;
  bool closeSent_ = false;
  unsigned maskCounter_ = 0;
};

}  // namespace perfcity
