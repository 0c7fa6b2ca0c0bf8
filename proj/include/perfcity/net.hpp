#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace perfcity::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // "host:port" or ":port" (binds all interfaces). Throws Error{InvalidConfig}.
  static Endpoint parse(std::string_view text);
  std::string str() const;
  bool operator==(const Endpoint&) const = default;
};

// Owning file descriptor for a TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close() noexcept;
  // Wakes any thread blocked in recv/accept on this socket.
  void shutdown() const noexcept;

  // Throws Error{IoError} on failure. Never raises SIGPIPE.
  void write_all(std::string_view data) const;

 private:
  int fd_ = -1;
};

class TcpListener {
 public:
  // Throws Error{BindFailure}.
  static TcpListener bind(const Endpoint& endpoint);

  std::uint16_t port() const noexcept { return port_; }
  // Blocks; returns nullopt once the listener has been shut down.
  std::optional<Socket> accept();
  void shutdown() const noexcept { socket_.shutdown(); }

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

// Throws Error{ConnectionRefused}.
Socket connect_to(const Endpoint& endpoint);

// Buffered reader over a socket it does not own.
class ByteStream {
 public:
  static constexpr std::size_t kMaxLine = 64u << 20;

  explicit ByteStream(int fd) : fd_(fd) {}

  // nullopt on orderly EOF. A final unterminated line is returned as-is.
  // Throws Error{IoError} on socket errors or lines over kMaxLine.
  std::optional<std::string> read_line();
  // Reads exactly n bytes; nullopt on EOF before n bytes.
  std::optional<std::string> read_exact(std::size_t n);
  // Makes at least n bytes available; false on EOF first.
  bool fill(std::size_t n);
  std::string_view buffered() const { return std::string_view(buf_).substr(pos_); }
  // True when data is buffered or arrives within `timeout`.
  bool wait_readable(std::chrono::milliseconds timeout);

 private:
  bool read_more();
  void compact();

  int fd_;
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace perfcity::net
