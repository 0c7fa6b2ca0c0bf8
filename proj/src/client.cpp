#include "perfcity/client.hpp"

#include "perfcity/error.hpp"

namespace perfcity {

ClientConnection::ClientConnection(net::Socket socket) : socket_(std::move(socket)), stream_(socket_.fd()) {}

std::unique_ptr<ClientConnection> ClientConnection::connect(const net::Endpoint& endpoint, Transport transport) {
  std::unique_ptr<ClientConnection> c(new ClientConnection(net::connect_to(endpoint)));
  if (transport == Transport::WebSocket) {
    ws::client_handshake(c->socket_, c->stream_, endpoint.str());
    c->channel_ = std::make_unique<WebSocketChannel>(c->socket_, c->stream_, WebSocketChannel::Role::Client);
  } else {
    c->channel_ = std::make_unique<LineChannel>(c->socket_, c->stream_);
    c->send(SubscribeRequest{});
  }
  return c;
}

void ClientConnection::send(const ClientRequest& request) { channel_->send(encode_client_request(request)); }

ClientConnection::Received ClientConnection::receive_raw(std::chrono::milliseconds timeout) {
  if (closed_) return {Received::Status::Closed, {}};
  if (!stream_.wait_readable(timeout)) return {Received::Status::Timeout, {}};
  auto message = channel_->receive();
  if (!message) {
    closed_ = true;
    return {Received::Status::Closed, {}};
  }
  return {Received::Status::Message, std::move(*message)};
}

std::optional<ServerMessage> ClientConnection::receive(std::chrono::milliseconds timeout) {
  auto r = receive_raw(timeout);
  if (r.status != Received::Status::Message) return std::nullopt;
  return decode_server_message(r.text);
}

void ClientConnection::close() {
  if (channel_) channel_->close();
  socket_.shutdown();
  closed_ = true;
}

}  // namespace perfcity
