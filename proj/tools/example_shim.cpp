// Minimal third-party-style adapter shim, written only against the
// documented contract (see README, "Adding a backend"): standard flags,
// the ASCII-timestamp payload format, 4-byte big-endian length framing
// over TCP, one JSON report on stdout. Deliberately self-contained — it
// shares no code with the harness, so it doubles as an independent
// check of the wire contract.
#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <unistd.h>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

namespace {

std::uint64_t wall_ns() {
  timespec ts{};
  clock_gettime(CLOCK_REALTIME, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1000000000ull + ts.tv_nsec;
}

std::uint64_t mono_ns() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1000000000ull + ts.tv_nsec;
}

bool write_all(int fd, const unsigned char* data, size_t len) {
  size_t done = 0;
  while (done < len) {
    const ssize_t n = ::write(fd, data + done, len - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<size_t>(n);
  }
  return true;
}

bool read_all(int fd, unsigned char* data, size_t len, int silence_ms) {
  size_t done = 0;
  while (done < len) {
    pollfd pfd{fd, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, silence_ms);
    if (pr <= 0) return false;
    const ssize_t n = ::read(fd, data + done, len - done);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    done += static_cast<size_t>(n);
  }
  return true;
}

sockaddr_in parse_endpoint(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    std::fprintf(stderr, "endpoint must be host:port\n");
    std::exit(1);
  }
  sockaddr_in out{};
  out.sin_family = AF_INET;
  out.sin_port = htons(static_cast<std::uint16_t>(std::atoi(addr.c_str() + colon + 1)));
  if (inet_pton(AF_INET, addr.substr(0, colon).c_str(), &out.sin_addr) != 1) {
    std::fprintf(stderr, "bad host in endpoint\n");
    std::exit(1);
  }
  return out;
}

int run_publisher(const sockaddr_in& addr, long count, long size, long interval_us,
                  long delay_ms) {
  const int listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
  int one = 1;
  setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(listen_fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd, 16) != 0) {
    std::perror("bind/listen");
    return 1;
  }

  // Collect subscriber connections while the start delay runs.
  std::vector<int> conns;
  std::atomic<bool> accepting{true};
  std::thread acceptor([&] {
    while (accepting.load()) {
      pollfd pfd{listen_fd, POLLIN, 0};
      if (::poll(&pfd, 1, 50) <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd >= 0) {
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        conns.push_back(fd);
      }
    }
  });

  std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
  accepting.store(false);
  acceptor.join();

  std::vector<unsigned char> frame(4 + static_cast<size_t>(size));
  frame[0] = static_cast<unsigned char>(size >> 24);
  frame[1] = static_cast<unsigned char>(size >> 16);
  frame[2] = static_cast<unsigned char>(size >> 8);
  frame[3] = static_cast<unsigned char>(size);
  std::memset(frame.data() + 4, 'A', static_cast<size_t>(size));

  std::uint64_t first_send = 0, last_send = 0;
  const std::uint64_t t0 = mono_ns();
  long sent = 0;
  for (long i = 0; i < count; i++) {
    if (interval_us > 0 && i > 0) {
      const std::uint64_t target = t0 + static_cast<std::uint64_t>(i) * interval_us * 1000;
      while (mono_ns() < target) {
        // coarse sleep, then settle
        const std::uint64_t left = target - mono_ns();
        if (left > 100000) std::this_thread::sleep_for(std::chrono::nanoseconds(left - 50000));
      }
    }
    const std::uint64_t stamp = wall_ns();
    char header[32];
    const int header_len = std::snprintf(header, sizeof(header), "%" PRIu64 "|", stamp);
    std::memcpy(frame.data() + 4, header, static_cast<size_t>(header_len));
    std::memset(frame.data() + 4 + header_len, 'A', static_cast<size_t>(size - header_len));
    for (const int fd : conns) {
      write_all(fd, frame.data(), frame.size());
    }
    if (i == 0) first_send = stamp;
    last_send = stamp;
    sent++;
  }
  for (const int fd : conns) ::close(fd);
  ::close(listen_fd);

  std::printf("{\"schema\":\"1\",\"first_send_ns\":%" PRIu64 ",\"last_send_ns\":%" PRIu64
              ",\"sent\":%ld}\n",
              first_send, last_send, sent);
  return 0;
}

int run_subscriber(const sockaddr_in& addr, long count, long size) {
  int fd = -1;
  const std::uint64_t deadline = mono_ns() + 5ull * 1000000000ull;
  for (;;) {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) break;
    ::close(fd);
    fd = -1;
    if (mono_ns() > deadline) {
      std::fprintf(stderr, "publisher never appeared\n");
      return 1;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  std::vector<double> latencies;
  latencies.reserve(static_cast<size_t>(count));
  std::vector<unsigned char> body(static_cast<size_t>(size));
  std::uint64_t last_recv = 0;
  long received = 0;
  while (received < count) {
    unsigned char header[4];
    if (!read_all(fd, header, 4, 5000)) break;
    const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                              (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
    if (len != static_cast<std::uint32_t>(size)) {
      std::fprintf(stderr, "unexpected frame length %u\n", len);
      break;
    }
    if (!read_all(fd, body.data(), len, 5000)) break;
    const std::uint64_t now = wall_ns();
    const std::uint64_t stamp = std::strtoull(reinterpret_cast<const char*>(body.data()),
                                              nullptr, 10);
    latencies.push_back(static_cast<double>(now - stamp) / 1000.0);
    last_recv = now;
    received++;
  }
  ::close(fd);

  std::printf("{\"schema\":\"1\",\"latencies_us\":[");
  for (size_t i = 0; i < latencies.size(); i++) {
    std::printf(i == 0 ? "%.3f" : ",%.3f", latencies[i]);
  }
  std::printf("],\"last_recv_ns\":%" PRIu64 ",\"received\":%ld}\n", last_recv, received);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string role, endpoint, transport;
  long count = 0, size = 0, interval_us = 0, delay_ms = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const char* value = argv[i + 1];
    if (flag == "--role") role = value;
    else if (flag == "--endpoint") endpoint = value;
    else if (flag == "--transport") transport = value;
    else if (flag == "--count") count = std::atol(value);
    else if (flag == "--size") size = std::atol(value);
    else if (flag == "--interval-us") interval_us = std::atol(value);
    else if (flag == "--delay-ms") delay_ms = std::atol(value);
  }
  if (transport != "tcp") {
    std::fprintf(stderr, "this example shim only implements the tcp transport\n");
    return 1;
  }
  if (role.empty() || endpoint.empty() || count <= 0 || size < 21) {
    std::fprintf(stderr, "usage: --role pub|sub --endpoint host:port --transport tcp "
                         "--count C --size P --interval-us T --delay-ms D\n");
    return 1;
  }
  const sockaddr_in addr = parse_endpoint(endpoint);
  signal(SIGPIPE, SIG_IGN);
  if (role == "pub") return run_publisher(addr, count, size, interval_us, delay_ms);
  return run_subscriber(addr, count, size);
}
