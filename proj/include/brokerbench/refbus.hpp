// Bundled reference brokerless PUB/SUB backend. One publisher binds an
// endpoint, any number of subscribers connect, every message is copied
// into one bounded FIFO per subscriber. A full queue drops the incoming
// message for that subscriber and counts it (drop-newest, the common
// high-water-mark behavior). Three transports: in-process queues, Unix
// domain stream sockets, and loopback TCP with Nagle disabled.
#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "brokerbench/backend.hpp"
#include "brokerbench/clock.hpp"

namespace brokerbench::refbus {

using codec::payload_bytes;

// Per-subscriber delivery accounting, the basis of the conservation
// check sent = received + dropped + in-flight at teardown.
struct delivery_stats {
  std::uint64_t offered = 0;   // fanout attempts while this link existed
  std::uint64_t enqueued = 0;  // accepted into the queue
  std::uint64_t dropped = 0;   // rejected, queue full
  std::uint64_t written = 0;   // handed to the consumer / written to the socket
  std::uint64_t remaining() const { return enqueued - written; }
};

struct fanout_stats {
  std::uint64_t sent = 0;  // publisher-side send() calls
  std::vector<delivery_stats> per_subscriber;
};

class bounded_queue {
public:
  explicit bounded_queue(std::size_t capacity) : capacity_(capacity) {}

  // Returns false when the message was dropped (queue full or closed).
  bool push(payload_bytes msg) {
    std::lock_guard lock(mutex_);
    if (closed_ || queue_.size() >= capacity_) {
      ++dropped_;
      return false;
    }
    queue_.push_back(std::move(msg));
    ++enqueued_;
    cv_.notify_one();
    return true;
  }

  // Pending messages stay poppable after close(); stream_end is reported
  // only once the queue is both closed and drained.
  recv_result pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; })) {
      return {recv_kind::timed_out, {}};
    }
    if (!queue_.empty()) {
      payload_bytes bytes = std::move(queue_.front());
      queue_.pop_front();
      ++popped_;
      return {recv_kind::message, std::move(bytes)};
    }
    return {recv_kind::stream_end, {}};
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    cv_.notify_all();
  }

  struct counters {
    std::uint64_t enqueued = 0;
    std::uint64_t dropped = 0;
    std::uint64_t popped = 0;
    std::size_t pending = 0;
  };

  counters snapshot() const {
    std::lock_guard lock(mutex_);
    return {enqueued_, dropped_, popped_, queue_.size()};
  }

private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<payload_bytes> queue_;
  std::size_t capacity_;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t popped_ = 0;
  bool closed_ = false;
};

// ---------------------------------------------------------------------------
// Length-prefixed framing for the stream transports: 4-byte big-endian
// body length, then the body. The parser is incremental and tolerates
// arbitrary split points at the read boundary.

inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 26;  // 64 MB guard

class frame_parser {
public:
  explicit frame_parser(std::size_t max_frame = kMaxFrameBytes) : max_frame_(max_frame) {}

  void feed(std::span<const std::uint8_t> data) {
    buffer_.insert(buffer_.end(), data.begin(), data.end());
  }

  std::optional<payload_bytes> next() {
    const std::size_t available = buffer_.size() - pos_;
    if (available < 4) return std::nullopt;
    const std::size_t len = (std::size_t{buffer_[pos_]} << 24) |
                            (std::size_t{buffer_[pos_ + 1]} << 16) |
                            (std::size_t{buffer_[pos_ + 2]} << 8) | std::size_t{buffer_[pos_ + 3]};
    if (len == 0 || len > max_frame_) {
      fail(errc::malformed_payload, "frame length " + std::to_string(len) + " out of bounds");
    }
    if (available < 4 + len) return std::nullopt;
    payload_bytes out(buffer_.begin() + static_cast<std::ptrdiff_t>(pos_ + 4),
                      buffer_.begin() + static_cast<std::ptrdiff_t>(pos_ + 4 + len));
    pos_ += 4 + len;
    if (pos_ == buffer_.size()) {
      buffer_.clear();
      pos_ = 0;
    } else if (pos_ > (std::size_t{1} << 20)) {
      buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos_));
      pos_ = 0;
    }
    return out;
  }

  bool has_partial() const { return buffer_.size() > pos_; }

private:
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
  std::size_t max_frame_;
};

inline void encode_frame_header(std::uint32_t len, std::uint8_t out[4]) {
  out[0] = static_cast<std::uint8_t>(len >> 24);
  out[1] = static_cast<std::uint8_t>(len >> 16);
  out[2] = static_cast<std::uint8_t>(len >> 8);
  out[3] = static_cast<std::uint8_t>(len);
}

// ---------------------------------------------------------------------------
// In-process transport.

namespace detail {

class inproc_channel {
public:
  explicit inproc_channel(std::size_t capacity) : capacity_(capacity) {}

  std::shared_ptr<bounded_queue> subscribe() {
    std::lock_guard lock(mutex_);
    if (closed_) fail(errc::connection_refused, "inproc channel already closed");
    auto q = std::make_shared<bounded_queue>(capacity_);
    links_.push_back(link{q, 0});
    return q;
  }

  void fanout(std::span<const std::uint8_t> payload) {
    std::lock_guard lock(mutex_);
    if (closed_) fail(errc::handle_closed, "send on a closed inproc publisher");
    ++sent_;
    for (link& l : links_) {
      ++l.offered;
      l.queue->push(payload_bytes(payload.begin(), payload.end()));
    }
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    for (link& l : links_) l.queue->close();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

  fanout_stats stats() const {
    std::lock_guard lock(mutex_);
    fanout_stats out;
    out.sent = sent_;
    for (const link& l : links_) {
      const auto c = l.queue->snapshot();
      delivery_stats d;
      d.offered = l.offered;
      d.enqueued = c.enqueued;
      d.dropped = c.dropped;
      d.written = c.popped;
      out.per_subscriber.push_back(d);
    }
    return out;
  }

private:
  struct link {
    std::shared_ptr<bounded_queue> queue;
    std::uint64_t offered = 0;
  };

  mutable std::mutex mutex_;
  std::vector<link> links_;
  std::size_t capacity_;
  std::uint64_t sent_ = 0;
  bool closed_ = false;
};

class inproc_registry {
public:
  static inproc_registry& instance() {
    static inproc_registry reg;
    return reg;
  }

  std::shared_ptr<inproc_channel> create(const std::string& name, std::size_t capacity) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = channels_.try_emplace(name);
    if (!inserted) fail(errc::duplicate_name, "inproc channel '" + name + "' already bound");
    it->second = std::make_shared<inproc_channel>(capacity);
    return it->second;
  }

  std::shared_ptr<inproc_channel> lookup(const std::string& name) {
    std::lock_guard lock(mutex_);
    auto it = channels_.find(name);
    return it == channels_.end() ? nullptr : it->second;
  }

  void remove(const std::string& name) {
    std::lock_guard lock(mutex_);
    channels_.erase(name);
  }

private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<inproc_channel>> channels_;
};

}  // namespace detail

class inproc_publisher final : public publisher {
public:
  inproc_publisher(endpoint ep, const bus_options& options) : endpoint_(std::move(ep)) {
    channel_ = detail::inproc_registry::instance().create(endpoint_.address,
                                                          options.queue_capacity);
  }

  ~inproc_publisher() override { close(); }

  void send(std::span<const std::uint8_t> payload) override { channel_->fanout(payload); }

  endpoint bound_endpoint() const override { return endpoint_; }

  void close() override {
    if (closed_.exchange(true)) return;
    channel_->close();
    detail::inproc_registry::instance().remove(endpoint_.address);
  }

  fanout_stats stats() const { return channel_->stats(); }

private:
  endpoint endpoint_;
  std::shared_ptr<detail::inproc_channel> channel_;
  std::atomic<bool> closed_{false};
};

class inproc_subscriber final : public subscriber {
public:
  inproc_subscriber(const endpoint& ep, const bus_options& options) {
    // The publisher may not have bound yet; retry so that start order
    // does not matter and the publisher delay can be varied freely.
    const std::uint64_t deadline =
        mono_clock_ns() + static_cast<std::uint64_t>(options.connect_timeout.count()) * 1'000'000;
    for (;;) {
      auto channel = detail::inproc_registry::instance().lookup(ep.address);
      if (channel) {
        queue_ = channel->subscribe();
        return;
      }
      if (mono_clock_ns() >= deadline) {
        fail(errc::connection_refused,
             "no inproc publisher appeared at '" + ep.address + "' within the retry window");
      }
      std::this_thread::sleep_for(options.connect_backoff);
    }
  }

  recv_result receive(std::chrono::milliseconds timeout) override {
    if (closed_) fail(errc::handle_closed, "receive on a closed subscriber");
    return queue_->pop(timeout);
  }

  void close() override { closed_ = true; }

private:
  std::shared_ptr<bounded_queue> queue_;
  bool closed_ = false;
};

// ---------------------------------------------------------------------------
// Stream transports (Unix domain sockets and TCP).

namespace detail {

[[noreturn]] inline void fail_errno(errc fallback, const std::string& what) {
  const int err = errno;
  errc code = fallback;
  if (err == EADDRINUSE) code = errc::address_in_use;
  else if (err == EACCES || err == EPERM) code = errc::permission_denied;
  else if (err == ENAMETOOLONG) code = errc::path_too_long;
  else if (err == ECONNREFUSED) code = errc::connection_refused;
  fail(code, what + ": " + std::strerror(err));
}

inline void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

inline void configure_tcp(int fd, const bus_options& options) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  if (options.tcp_buffer_bytes > 0) {
    setsockopt(fd, SOL_SOCKET, SO_SNDBUF, &options.tcp_buffer_bytes,
               sizeof(options.tcp_buffer_bytes));
    setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &options.tcp_buffer_bytes,
               sizeof(options.tcp_buffer_bytes));
  }
}

inline sockaddr_in parse_tcp_address(const endpoint& ep) {
  validate_endpoint(ep);
  const auto colon = ep.address.rfind(':');
  const std::string host = ep.address.substr(0, colon);
  const int port = std::stoi(ep.address.substr(colon + 1));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    fail(errc::invalid_endpoint, "tcp host must be an IPv4 literal, got '" + host + "'");
  }
  return addr;
}

inline sockaddr_un parse_ipc_address(const endpoint& ep) {
  validate_endpoint(ep);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (ep.address.size() >= sizeof(addr.sun_path)) {
    fail(errc::path_too_long, "socket path exceeds " +
                                  std::to_string(sizeof(addr.sun_path) - 1) + " bytes: '" +
                                  ep.address + "'");
  }
  std::memcpy(addr.sun_path, ep.address.c_str(), ep.address.size() + 1);
  return addr;
}

// Writes the whole buffer, polling for writability against a deadline.
// Returns false when the peer stalled past the deadline or went away.
inline bool write_all(int fd, const std::uint8_t* data, std::size_t len,
                      std::chrono::milliseconds progress_timeout) {
  std::size_t done = 0;
  while (done < len) {
    const ssize_t n = ::write(fd, data + done, len - done);
    if (n > 0) {
      done += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      pollfd pfd{fd, POLLOUT, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(progress_timeout.count()));
      if (pr <= 0) return false;
      continue;
    }
    return false;  // EPIPE, ECONNRESET, ...
  }
  return true;
}

}  // namespace detail

class stream_publisher final : public publisher {
public:
  stream_publisher(endpoint ep, const bus_options& options)
      : endpoint_(std::move(ep)), options_(options) {
    if (endpoint_.kind == transport::tcp) {
      bind_tcp();
    } else {
      bind_ipc();
    }
    if (::listen(listen_fd_, 64) != 0) {
      detail::fail_errno(errc::io_error, "listen on " + endpoint_.address);
    }
    detail::set_nonblocking(listen_fd_);
    if (::pipe(wake_pipe_) != 0) {
      detail::fail_errno(errc::io_error, "acceptor wake pipe");
    }
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~stream_publisher() override { close(); }

  void send(std::span<const std::uint8_t> payload) override {
    std::lock_guard lock(connections_mutex_);
    if (closed_) fail(errc::handle_closed, "send on a closed publisher");
    ++sent_;
    for (auto& conn : connections_) {
      ++conn->offered;
      if (!conn->dead.load(std::memory_order_relaxed)) {
        conn->queue.push(payload_bytes(payload.begin(), payload.end()));
      } else {
        conn->post_mortem_drops++;
      }
    }
  }

  endpoint bound_endpoint() const override { return endpoint_; }

  void close() override {
    {
      std::lock_guard lock(connections_mutex_);
      if (closed_) return;
      closed_ = true;
    }
    stop_acceptor();
    std::lock_guard lock(connections_mutex_);
    for (auto& conn : connections_) {
      conn->queue.close();
      if (conn->writer.joinable()) conn->writer.join();
      ::shutdown(conn->fd, SHUT_RDWR);
      ::close(conn->fd);
    }
    if (listen_fd_ >= 0) {
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
    if (endpoint_.kind == transport::inter_process) {
      ::unlink(endpoint_.address.c_str());
    }
  }

  fanout_stats stats() const {
    std::lock_guard lock(connections_mutex_);
    fanout_stats out;
    out.sent = sent_;
    for (const auto& conn : connections_) {
      const auto c = conn->queue.snapshot();
      delivery_stats d;
      d.offered = conn->offered;
      d.enqueued = c.enqueued;
      d.dropped = c.dropped + conn->post_mortem_drops;
      d.written = conn->written.load(std::memory_order_relaxed);
      out.per_subscriber.push_back(d);
    }
    return out;
  }

  std::size_t connection_count() const {
    std::lock_guard lock(connections_mutex_);
    return connections_.size();
  }

private:
  struct connection {
    explicit connection(int fd_in, std::size_t capacity) : fd(fd_in), queue(capacity) {}
    int fd;
    bounded_queue queue;
    std::thread writer;
    std::atomic<std::uint64_t> written{0};
    std::atomic<bool> dead{false};
    std::uint64_t offered = 0;            // guarded by connections_mutex_
    std::uint64_t post_mortem_drops = 0;  // guarded by connections_mutex_
  };

  void bind_tcp() {
    const sockaddr_in addr = detail::parse_tcp_address(endpoint_);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listen_fd_ < 0) detail::fail_errno(errc::io_error, "tcp socket");
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
      const std::string what = "bind tcp " + endpoint_.address;
      ::close(listen_fd_);
      listen_fd_ = -1;
      detail::fail_errno(errc::address_in_use, what);
    }
    // Port 0 asks the kernel for an ephemeral port; report the real one.
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    char host[INET_ADDRSTRLEN] = {0};
    inet_ntop(AF_INET, &bound.sin_addr, host, sizeof(host));
    endpoint_.address = std::string(host) + ":" + std::to_string(ntohs(bound.sin_port));
  }

  void bind_ipc() {
    const sockaddr_un addr = detail::parse_ipc_address(endpoint_);
    ::unlink(endpoint_.address.c_str());  // remove a stale socket file
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listen_fd_ < 0) detail::fail_errno(errc::io_error, "unix socket");
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
      const std::string what = "bind ipc " + endpoint_.address;
      ::close(listen_fd_);
      listen_fd_ = -1;
      detail::fail_errno(errc::permission_denied, what);
    }
  }

  void accept_loop() {
    for (;;) {
      pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
      const int pr = ::poll(fds, 2, -1);
      if (pr < 0 && errno == EINTR) continue;
      if (fds[1].revents != 0) return;
      if ((fds[0].revents & POLLIN) == 0) continue;
      const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd < 0) continue;
      if (endpoint_.kind == transport::tcp) detail::configure_tcp(fd, options_);
      detail::set_nonblocking(fd);
      auto conn = std::make_unique<connection>(fd, options_.queue_capacity);
      connection* raw = conn.get();
      conn->writer = std::thread([this, raw] { writer_loop(*raw); });
      std::lock_guard lock(connections_mutex_);
      connections_.push_back(std::move(conn));
    }
  }

  void writer_loop(connection& conn) {
    for (;;) {
      recv_result item = conn.queue.pop(std::chrono::milliseconds(100));
      if (item.kind == recv_kind::timed_out) continue;
      if (item.kind == recv_kind::stream_end) break;
      std::uint8_t header[4];
      encode_frame_header(static_cast<std::uint32_t>(item.bytes.size()), header);
      if (!detail::write_all(conn.fd, header, 4, options_.flush_timeout) ||
          !detail::write_all(conn.fd, item.bytes.data(), item.bytes.size(),
                             options_.flush_timeout)) {
        conn.dead.store(true, std::memory_order_relaxed);
        return;
      }
      conn.written.fetch_add(1, std::memory_order_relaxed);
    }
    ::shutdown(conn.fd, SHUT_WR);  // flush complete, signal EOF to the subscriber
  }

  void stop_acceptor() {
    if (acceptor_.joinable()) {
      const char byte = 'x';
      [[maybe_unused]] ssize_t n = ::write(wake_pipe_[1], &byte, 1);
      acceptor_.join();
    }
    if (wake_pipe_[0] >= 0) ::close(wake_pipe_[0]);
    if (wake_pipe_[1] >= 0) ::close(wake_pipe_[1]);
    wake_pipe_[0] = wake_pipe_[1] = -1;
  }

  endpoint endpoint_;
  bus_options options_;
  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::thread acceptor_;
  mutable std::mutex connections_mutex_;
  std::vector<std::unique_ptr<connection>> connections_;
  std::uint64_t sent_ = 0;
  bool closed_ = false;
};

class stream_subscriber final : public subscriber {
public:
  stream_subscriber(const endpoint& ep, const bus_options& options) {
    const std::uint64_t deadline =
        mono_clock_ns() + static_cast<std::uint64_t>(options.connect_timeout.count()) * 1'000'000;
    for (;;) {
      if (try_connect(ep, options)) return;
      if (mono_clock_ns() >= deadline) {
        fail(errc::connection_refused,
             "could not connect to " + ep.address + " within the retry window");
      }
      std::this_thread::sleep_for(options.connect_backoff);
    }
  }

  ~stream_subscriber() override { close(); }

  recv_result receive(std::chrono::milliseconds timeout) override {
    if (fd_ < 0) fail(errc::handle_closed, "receive on a closed subscriber");
    const std::uint64_t deadline =
        mono_clock_ns() + static_cast<std::uint64_t>(timeout.count()) * 1'000'000;
    for (;;) {
      if (auto frame = parser_.next()) return {recv_kind::message, std::move(*frame)};
      if (eof_) {
        if (parser_.has_partial()) {
          fail(errc::malformed_payload, "stream ended in the middle of a frame");
        }
        return {recv_kind::stream_end, {}};
      }
      const std::uint64_t now = mono_clock_ns();
      if (now >= deadline) return {recv_kind::timed_out, {}};
      pollfd pfd{fd_, POLLIN, 0};
      const int wait_ms = static_cast<int>((deadline - now + 999'999) / 1'000'000);
      const int pr = ::poll(&pfd, 1, wait_ms);
      if (pr < 0 && errno == EINTR) continue;
      if (pr <= 0) return {recv_kind::timed_out, {}};
      const ssize_t n = ::read(fd_, read_buffer_, sizeof(read_buffer_));
      if (n > 0) {
        parser_.feed({read_buffer_, static_cast<std::size_t>(n)});
      } else if (n == 0) {
        eof_ = true;
      } else if (errno != EINTR && errno != EAGAIN && errno != EWOULDBLOCK) {
        fail(errc::io_error, std::string("read: ") + std::strerror(errno));
      }
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

private:
  bool try_connect(const endpoint& ep, const bus_options& options) {
    int fd = -1;
    if (ep.kind == transport::tcp) {
      const sockaddr_in addr = detail::parse_tcp_address(ep);
      fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
      if (fd < 0) detail::fail_errno(errc::io_error, "tcp socket");
      if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        return retry_or_fail(fd, "connect tcp " + ep.address);
      }
      detail::configure_tcp(fd, options);
    } else {
      const sockaddr_un addr = detail::parse_ipc_address(ep);
      fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
      if (fd < 0) detail::fail_errno(errc::io_error, "unix socket");
      if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        return retry_or_fail(fd, "connect ipc " + ep.address);
      }
    }
    detail::set_nonblocking(fd);
    fd_ = fd;
    return true;
  }

  static bool retry_or_fail(int fd, const std::string& what) {
    const int err = errno;
    ::close(fd);
    // The publisher has not bound yet; these are the expected races.
    if (err == ECONNREFUSED || err == ENOENT || err == ECONNRESET || err == EAGAIN) return false;
    errno = err;
    detail::fail_errno(errc::connection_refused, what);
  }

  int fd_ = -1;
  bool eof_ = false;
  frame_parser parser_;
  std::uint8_t read_buffer_[64 * 1024];
};

// ---------------------------------------------------------------------------

inline std::unique_ptr<publisher> bind_publisher(const endpoint& ep,
                                                 const bus_options& options = {}) {
  validate_endpoint(ep);
  if (ep.kind == transport::in_process) {
    return std::make_unique<inproc_publisher>(ep, options);
  }
  return std::make_unique<stream_publisher>(ep, options);
}

inline std::unique_ptr<subscriber> connect_subscriber(const endpoint& ep,
                                                      const bus_options& options = {}) {
  validate_endpoint(ep);
  if (ep.kind == transport::in_process) {
    return std::make_unique<inproc_subscriber>(ep, options);
  }
  return std::make_unique<stream_subscriber>(ep, options);
}

// Asks the kernel for a currently free loopback port. Racy by nature,
// but runs are sequential and the chosen port is recorded.
inline int probe_free_tcp_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) detail::fail_errno(errc::io_error, "probe socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = 0;
  inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    detail::fail_errno(errc::io_error, "probe bind");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  ::close(fd);
  return ntohs(bound.sin_port);
}

inline std::string unique_suffix() {
  static std::atomic<std::uint64_t> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1));
}

}  // namespace brokerbench::refbus
