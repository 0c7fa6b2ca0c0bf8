#include "perfcity/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "perfcity/error.hpp"

namespace perfcity::net {
namespace {

std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list) ::freeaddrinfo(list);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out, Errc onError) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(ep.port);
  const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
  int rc = ::getaddrinfo(host, port.c_str(), &hints, &out.list);
  if (rc != 0) throw Error(onError, ep.str() + ": " + ::gai_strerror(rc));
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw Error(Errc::InvalidConfig, "address must be host:port, got '" + std::string(text) + "'");
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') ep.host = ep.host.substr(1, ep.host.size() - 2);
  auto portText = text.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(portText.data(), portText.data() + portText.size(), port);
  if (ec != std::errc{} || ptr != portText.data() + portText.size() || port > 65535 || portText.empty()) {
    throw Error(Errc::InvalidConfig, "bad port in '" + std::string(text) + "'");
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() const noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::write_all(std::string_view data) const {
  while (!data.empty()) {
    ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::IoError, "send: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

TcpListener TcpListener::bind(const Endpoint& endpoint) {
  AddrInfo ai;
  resolve(endpoint, true, ai, Errc::BindFailure);
  std::string lastError = "no usable address";
  for (addrinfo* a = ai.list; a; a = a->ai_next) {
    Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
    if (!s.valid()) {
      lastError = errno_text();
      continue;
    }
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), a->ai_addr, a->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) {
      lastError = errno_text();
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    TcpListener l;
    l.port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                                : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    l.socket_ = std::move(s);
    return l;
  }
  throw Error(Errc::BindFailure, endpoint.str() + ": " + lastError);
}

std::optional<Socket> TcpListener::accept() {
  for (;;) {
    int fd = ::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return std::nullopt;
  }
}

Socket connect_to(const Endpoint& endpoint) {
  AddrInfo ai;
  resolve(endpoint, false, ai, Errc::ConnectionRefused);
  std::string lastError = "no usable address";
  for (addrinfo* a = ai.list; a; a = a->ai_next) {
    Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
    if (!s.valid()) {
      lastError = errno_text();
      continue;
    }
    if (::connect(s.fd(), a->ai_addr, a->ai_addrlen) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    lastError = errno_text();
  }
  throw Error(Errc::ConnectionRefused, endpoint.str() + ": " + lastError);
}

void ByteStream::compact() {
  if (pos_ > 0 && pos_ >= buf_.size() / 2) {
    buf_.erase(0, pos_);
    pos_ = 0;
  }
}

bool ByteStream::read_more() {
  compact();
  char chunk[16384];
  for (;;) {
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n > 0) {
      buf_.append(chunk, static_cast<std::size_t>(n));
      return true;
    }
    if (n == 0) return false;
    if (errno == EINTR) continue;
    // A locally shut-down socket reports errors on some paths; treat as EOF.
    if (errno == ECONNRESET || errno == EBADF || errno == ENOTCONN) return false;
    throw Error(Errc::IoError, "recv: " + errno_text());
  }
}

std::optional<std::string> ByteStream::read_line() {
  std::size_t scanFrom = pos_;
  for (;;) {
    auto nl = buf_.find('\n', scanFrom);
    if (nl != std::string::npos) {
      std::string line = buf_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (buf_.size() - pos_ > kMaxLine) throw Error(Errc::IoError, "line exceeds limit");
    scanFrom = buf_.size();
    const std::size_t before = pos_;
    if (!read_more()) {
      if (pos_ < buf_.size()) {
        std::string line = buf_.substr(pos_);
        pos_ = buf_.size();
        return line;
      }
      return std::nullopt;
    }
    scanFrom -= before - pos_;  // compaction shifted the buffer
  }
}

bool ByteStream::fill(std::size_t n) {
  while (buf_.size() - pos_ < n) {
    if (!read_more()) return false;
  }
  return true;
}

std::optional<std::string> ByteStream::read_exact(std::size_t n) {
  if (!fill(n)) return std::nullopt;
  std::string out = buf_.substr(pos_, n);
  pos_ += n;
  return out;
}

bool ByteStream::wait_readable(std::chrono::milliseconds timeout) {
  if (pos_ < buf_.size()) return true;
  pollfd p{fd_, POLLIN, 0};
  for (;;) {
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    return rc > 0;
  }
}

}  // namespace perfcity::net
