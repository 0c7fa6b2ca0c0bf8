#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>

#include "perfcity/channel.hpp"
#include "perfcity/error.hpp"

namespace perfcity {

void LineChannel::send(std::string_view message) {
  std::string out;
  out.reserve(message.size() + 1);
  out.append(message);
  out.push_back('\n');
  std::lock_guard lock(writeMutex_);
  socket_.write_all(out);
}

namespace ws {
namespace {

constexpr std::string_view kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Reads header lines up to the blank line; returns lower-cased name -> value.
std::vector<std::pair<std::string, std::string>> read_headers(net::ByteStream& stream) {
  std::vector<std::pair<std::string, std::string>> headers;
  for (int i = 0; i < 128; ++i) {
    auto line = stream.read_line();
    if (!line) throw Error(Errc::IoError, "connection closed during handshake");
    if (line->empty()) return headers;
    auto colon = line->find(':');
    if (colon == std::string::npos) continue;
    headers.emplace_back(lower(trim(std::string_view(*line).substr(0, colon))),
                         std::string(trim(std::string_view(*line).substr(colon + 1))));
  }
  throw Error(Errc::IoError, "too many handshake headers");
}

const std::string* header(const std::vector<std::pair<std::string, std::string>>& headers, std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::string base64(const unsigned char* data, std::size_t len) {
  std::string out(4 * ((len + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data, static_cast<int>(len));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace

std::string accept_key(std::string_view clientKey) {
  std::string material(clientKey);
  material.append(kGuid);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digestLen = 0;
  EVP_Digest(material.data(), material.size(), digest, &digestLen, EVP_sha1(), nullptr);
  return base64(digest, digestLen);
}

std::string encode_frame(Opcode op, std::string_view payload, const unsigned char* mask) {
  std::string out;
  out.reserve(payload.size() + 14);
  out.push_back(static_cast<char>(0x80 | static_cast<unsigned char>(op)));
  const unsigned char maskBit = mask ? 0x80 : 0x00;
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(maskBit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(maskBit | 126));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(maskBit | 127));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> shift) & 0xFF));
  }
  if (mask) {
    out.append(reinterpret_cast<const char*>(mask), 4);
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(payload[i] ^ mask[i % 4]));
  } else {
    out.append(payload);
  }
  return out;
}

std::optional<Frame> read_frame(net::ByteStream& stream, std::size_t maxPayload) {
  auto head = stream.read_exact(2);
  if (!head) return std::nullopt;
  const auto b0 = static_cast<unsigned char>((*head)[0]);
  const auto b1 = static_cast<unsigned char>((*head)[1]);
  if (b0 & 0x70) throw Error(Errc::IoError, "websocket: reserved bits set");
  Frame f;
  f.fin = (b0 & 0x80) != 0;
  f.op = static_cast<Opcode>(b0 & 0x0F);
  const bool masked = (b1 & 0x80) != 0;
  std::uint64_t len = b1 & 0x7F;
  if (len == 126 || len == 127) {
    const std::size_t extra = len == 126 ? 2 : 8;
    auto ext = stream.read_exact(extra);
    if (!ext) return std::nullopt;
    len = 0;
    for (char c : *ext) len = (len << 8) | static_cast<unsigned char>(c);
  }
  if (len > maxPayload) throw Error(Errc::IoError, "websocket: frame too large");
  std::array<unsigned char, 4> mask{};
  if (masked) {
    auto m = stream.read_exact(4);
    if (!m) return std::nullopt;
    std::copy(m->begin(), m->end(), mask.begin());
  }
  auto body = stream.read_exact(static_cast<std::size_t>(len));
  if (!body) return std::nullopt;
  if (masked) {
    for (std::size_t i = 0; i < body->size(); ++i) (*body)[i] = static_cast<char>((*body)[i] ^ mask[i % 4]);
  }
  f.payload = std::move(*body);
  return f;
}

void server_handshake(const net::Socket& socket, net::ByteStream& stream) {
  auto requestLine = stream.read_line();
  if (!requestLine || requestLine->rfind("GET ", 0) != 0) throw Error(Errc::IoError, "websocket: expected GET");
  auto headers = read_headers(stream);
  const auto* upgrade = header(headers, "upgrade");
  const auto* key = header(headers, "sec-websocket-key");
  if (!upgrade || lower(*upgrade) != "websocket" || !key) {
    socket.write_all("HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
    throw Error(Errc::IoError, "websocket: not an upgrade request");
  }
  socket.write_all(
      "HTTP/1.1 101 Switching Protocols\r\n"
      "Upgrade: websocket\r\n"
      "Connection: Upgrade\r\n"
      "Sec-WebSocket-Accept: " +
      accept_key(*key) + "\r\n\r\n");
}

void client_handshake(const net::Socket& socket, net::ByteStream& stream, std::string_view host,
                      std::string_view path) {
  // A fixed key is fine: it only proves the server speaks the protocol.
  const std::string key = "cGVyZmNpdHktY2xpZW50IQ==";
  std::string request = "GET " + std::string(path) + " HTTP/1.1\r\nHost: " + std::string(host) +
                        "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Key: " + key +
                        "\r\nSec-WebSocket-Version: 13\r\n\r\n";
  socket.write_all(request);
  auto status = stream.read_line();
  if (!status || status->find(" 101") == std::string::npos) throw Error(Errc::IoError, "websocket: upgrade refused");
  auto headers = read_headers(stream);
  const auto* accept = header(headers, "sec-websocket-accept");
  if (!accept || *accept != accept_key(key)) throw Error(Errc::IoError, "websocket: bad accept key");
}

}  // namespace ws

void WebSocketChannel::send_frame(ws::Opcode op, std::string_view payload) {
  std::lock_guard lock(writeMutex_);
  if (closeSent_) return;
  if (op == ws::Opcode::Close) closeSent_ = true;
  if (role_ == Role::Client) {
    const unsigned v = ++maskCounter_ * 2654435761u;
    const unsigned char mask[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                   static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    socket_.write_all(ws::encode_frame(op, payload, mask));
  } else {
    socket_.write_all(ws::encode_frame(op, payload));
  }
}

void WebSocketChannel::send(std::string_view message) { send_frame(ws::Opcode::Text, message); }

void WebSocketChannel::close() {
  try {
    send_frame(ws::Opcode::Close, std::string_view("\x03\xe8", 2));
  } catch (const Error&) {
  }
}

std::optional<std::string> WebSocketChannel::receive() {
  std::string message;
  bool inMessage = false;
  for (;;) {
    auto frame = ws::read_frame(stream_);
    if (!frame) return std::nullopt;
    switch (frame->op) {
      case ws::Opcode::Ping:
        send_frame(ws::Opcode::Pong, frame->payload);
        continue;
      case ws::Opcode::Pong:
        continue;
      case ws::Opcode::Close:
        close();
        return std::nullopt;
      case ws::Opcode::Text:
      case ws::Opcode::Binary:
        if (inMessage) throw Error(Errc::IoError, "websocket: new message inside fragmented one");
        message = std::move(frame->payload);
        inMessage = true;
        break;
      case ws::Opcode::Continuation:
        if (!inMessage) throw Error(Errc::IoError, "websocket: stray continuation");
        message += frame->payload;
        break;
      default:
        throw Error(Errc::IoError, "websocket: unknown opcode");
    }
    if (frame->fin) return message;
  }
}

}  // namespace perfcity
