#include "perfcity/server.hpp"

#include <condition_variable>
#include <deque>
#include <iostream>

#include "perfcity/channel.hpp"
#include "perfcity/error.hpp"

namespace perfcity {
namespace {

// Single-consumer queue feeding one client's writer thread. After close()
// the consumer still drains what was queued.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t limit) : limit_(limit) {}

  void push(const SharedMessage& message) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return;
      if (queue_.size() >= limit_) {
        // The session can no longer be gapless; end it.
        overflowed_ = true;
        closed_ = true;
        queue_.clear();
      } else {
        queue_.push_back(message);
      }
    }
    cv_.notify_one();
  }

  std::optional<SharedMessage> pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return std::nullopt;
    auto m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  void discard() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
      queue_.clear();
    }
    cv_.notify_all();
  }

  bool overflowed() const {
    std::lock_guard lock(mutex_);
    return overflowed_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<SharedMessage> queue_;
  std::size_t limit_;
  bool closed_ = false;
  bool overflowed_ = false;
};

}  // namespace

struct Server::IngestConn {
  explicit IngestConn(net::Socket s) : socket(std::move(s)) {}
  net::Socket socket;
  std::atomic<bool> done{false};
  std::jthread thread;
};

struct Server::ClientConn {
  ClientConn(net::Socket s, std::size_t limit) : socket(std::move(s)), stream(socket.fd()), queue(limit) {}
  net::Socket socket;
  net::ByteStream stream;
  OutboundQueue queue;
  std::unique_ptr<MessageChannel> channel;  // set before the session subscribes
  std::atomic<bool> done{false};
  std::jthread writer;
  std::jthread reader;
};

void ServerConfig::validate() const {
  if (windowMs < 1) throw Error(Errc::InvalidConfig, "window-ms must be >= 1");
  if (historyCapacity < 1) throw Error(Errc::InvalidConfig, "history must be >= 1");
  if (maxQueuedMessages < 1) throw Error(Errc::InvalidConfig, "client queue limit must be >= 1");
  if (ingestAddress.port != 0 && ingestAddress == clientAddress) {
    throw Error(Errc::InvalidConfig, "ingest and serve addresses must differ");
  }
  layout.validate();
}

Server::Server(ServerConfig config)
    : config_(std::move(config)),
      core_(ServiceOptions{config_.windowMs, config_.historyCapacity, config_.layout}) {
  config_.validate();
}

Server::~Server() { stop(); }

void Server::start() {
  if (started_) return;
  ingestListener_ = net::TcpListener::bind(config_.ingestAddress);
  clientListener_ = net::TcpListener::bind(config_.clientAddress);
  ingestPort_ = ingestListener_->port();
  clientPort_ = clientListener_->port();
  started_ = true;
  ingestAcceptThread_ = std::jthread([this] { ingest_accept_loop(); });
  clientAcceptThread_ = std::jthread([this] { client_accept_loop(); });
  tickThread_ = std::jthread([this](std::stop_token st) { tick_loop(st); });
}

void Server::stop() {
  if (!started_ || stopped_) return;
  stopped_ = true;
  stopping_ = true;
  ingestListener_->shutdown();
  clientListener_->shutdown();
  if (ingestAcceptThread_.joinable()) ingestAcceptThread_.join();
  if (clientAcceptThread_.joinable()) clientAcceptThread_.join();

  std::lock_guard lock(connMutex_);
  for (auto& c : ingestConns_) c->socket.shutdown();
  for (auto& c : ingestConns_) {
    if (c->thread.joinable()) c->thread.join();
  }
  ingestConns_.clear();

  tickThread_.request_stop();
  if (tickThread_.joinable()) tickThread_.join();

  core_.flush();

  for (auto& c : clientConns_) c->queue.close();
  for (auto& c : clientConns_) {
    if (c->writer.joinable()) c->writer.join();
    if (c->reader.joinable()) c->reader.join();
  }
  clientConns_.clear();
}

void Server::reap_finished() {
  std::lock_guard lock(connMutex_);
  ingestConns_.remove_if([](const auto& c) {
    if (!c->done) return false;
    if (c->thread.joinable()) c->thread.join();
    return true;
  });
  clientConns_.remove_if([](const auto& c) {
    if (!c->done) return false;
    if (c->writer.joinable()) c->writer.join();
    if (c->reader.joinable()) c->reader.join();
    return true;
  });
}

void Server::ingest_accept_loop() {
  while (auto sock = ingestListener_->accept()) {
    if (stopping_) break;
    reap_finished();
    std::lock_guard lock(connMutex_);
    auto& conn = ingestConns_.emplace_back(std::make_unique<IngestConn>(std::move(*sock)));
    IngestConn* raw = conn.get();
    raw->thread = std::jthread([this, raw] { serve_ingest(*raw); });
  }
}

void Server::client_accept_loop() {
  while (auto sock = clientListener_->accept()) {
    if (stopping_) break;
    reap_finished();
    std::lock_guard lock(connMutex_);
    auto& conn = clientConns_.emplace_back(std::make_unique<ClientConn>(std::move(*sock), config_.maxQueuedMessages));
    ClientConn* raw = conn.get();
    raw->writer = std::jthread([raw] {
      while (auto m = raw->queue.pop()) {
        try {
          raw->channel->send(**m);
        } catch (const Error&) {
          raw->queue.discard();
          break;
        }
      }
      if (raw->channel) raw->channel->close();
      raw->socket.shutdown();
    });
    raw->reader = std::jthread([this, raw] { serve_client(*raw); });
  }
}

void Server::serve_ingest(IngestConn& conn) {
  net::ByteStream stream(conn.socket.fd());
  const SourceId source = core_.open_source();
  try {
    while (auto line = stream.read_line()) core_.ingest_line(source, *line);
  } catch (const Error& e) {
    if (!stopping_) std::cerr << "perfcity: ingest connection: " << e.what() << '\n';
  }
  core_.close_source(source);
  conn.done = true;
}

void Server::serve_client(ClientConn& conn) {
  std::optional<SessionId> session;
  try {
    if (conn.stream.fill(1)) {
      if (conn.stream.buffered().front() == 'G') {
        ws::server_handshake(conn.socket, conn.stream);
        conn.channel = std::make_unique<WebSocketChannel>(conn.socket, conn.stream, WebSocketChannel::Role::Server);
      } else {
        conn.channel = std::make_unique<LineChannel>(conn.socket, conn.stream);
      }
      session = core_.subscribe([&conn](const SharedMessage& m) { conn.queue.push(m); });
      while (auto message = conn.channel->receive()) core_.handle_client_line(*session, *message);
    }
  } catch (const Error& e) {
    if (!stopping_) std::cerr << "perfcity: client connection: " << e.what() << '\n';
  }
  if (session) core_.unsubscribe(*session);
  conn.queue.close();
  conn.done = true;
}

void Server::tick_loop(std::stop_token stop) {
  const auto period = std::chrono::milliseconds(std::max<std::int64_t>(1, config_.windowMs / 10));
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  while (!stop.stop_requested()) {
    core_.tick();
    cv.wait_for(lock, stop, period, [] { return false; });
  }
}

}  // namespace perfcity
