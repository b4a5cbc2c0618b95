// Transport-agnostic messaging surface every benchmarked library sits
// behind: endpoints, backend descriptors, and the publisher/subscriber
// handle interfaces. Concrete in-tree implementations live in refbus.hpp;
// out-of-tree libraries join through the subprocess adapter protocol
// (adapter.hpp).
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "brokerbench/codec.hpp"
#include "brokerbench/common.hpp"

namespace brokerbench {

enum class transport { in_process, inter_process, tcp };

inline const char* transport_name(transport t) {
  switch (t) {
    case transport::in_process: return "inproc";
    case transport::inter_process: return "ipc";
    case transport::tcp: return "tcp";
  }
  return "?";
}

inline transport transport_from_name(const std::string& name) {
  if (name == "inproc") return transport::in_process;
  if (name == "ipc") return transport::inter_process;
  if (name == "tcp") return transport::tcp;
  fail(errc::usage_error, "unknown transport '" + name + "' (expected inproc, ipc, or tcp)");
}

// Address meaning depends on the transport: a channel name for inproc,
// a filesystem path for ipc, host:port for tcp. TCP stays on loopback by
// default; one-way latencies need a shared clock, which means one host.
struct endpoint {
  transport kind = transport::in_process;
  std::string address;

  friend bool operator==(const endpoint&, const endpoint&) = default;
};

inline void validate_endpoint(const endpoint& ep) {
  if (ep.address.empty()) fail(errc::invalid_endpoint, "endpoint address is empty");
  if (ep.kind == transport::tcp) {
    const auto colon = ep.address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == ep.address.size()) {
      fail(errc::invalid_endpoint, "tcp endpoint must be host:port, got '" + ep.address + "'");
    }
    const std::string port = ep.address.substr(colon + 1);
    for (char c : port) {
      if (c < '0' || c > '9') {
        fail(errc::invalid_endpoint, "tcp port is not numeric in '" + ep.address + "'");
      }
    }
    const long p = std::stol(port);
    if (p < 0 || p > 65535) fail(errc::invalid_endpoint, "tcp port out of range");
  }
}

enum class backend_kind { in_tree, subprocess_adapter };

inline const char* backend_kind_name(backend_kind k) {
  return k == backend_kind::in_tree ? "intree" : "adapter";
}

// Tunables of the bundled reference bus. Both knobs shift measured
// curves, so they are recorded in every config snapshot.
struct bus_options {
  std::size_t queue_capacity = 1000;  // messages per subscriber queue
  int tcp_buffer_bytes = 64 * 1024;   // SO_SNDBUF / SO_RCVBUF
  std::chrono::milliseconds connect_backoff{10};
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds flush_timeout{5000};

  friend bool operator==(const bus_options&, const bus_options&) = default;
};

// Synthetic latency injected by the stub backend, in microseconds:
// subscriber j of run r observes base + j*subscriber_step + r*run_step
// for every message. Deterministic by construction.
struct stub_timing {
  double base_delay_us = 10.0;
  double subscriber_step_us = 0.0;
  double run_step_us = 0.0;

  friend bool operator==(const stub_timing&, const stub_timing&) = default;
};

struct backend_descriptor {
  std::string name;
  backend_kind kind = backend_kind::in_tree;
  std::set<transport> supported_transports;
  // Command prefix launched once per role for adapter backends and for
  // in-tree backends on process-per-role transports (ipc, tcp).
  std::vector<std::string> adapter_command;
  bus_options options{};
  // Synthetic backends run inline with virtual time instead of threads.
  bool synthetic = false;
  stub_timing stub{};

  bool supports(transport t) const { return supported_transports.count(t) > 0; }
};

inline backend_descriptor refbus_descriptor(bus_options options = {},
                                            std::vector<std::string> shim_command = {}) {
  backend_descriptor d;
  d.name = "refbus";
  d.kind = backend_kind::in_tree;
  d.supported_transports = {transport::in_process, transport::inter_process, transport::tcp};
  d.adapter_command = std::move(shim_command);
  d.options = options;
  return d;
}

inline backend_descriptor stub_descriptor(stub_timing timing = {}) {
  backend_descriptor d;
  d.name = "stub";
  d.kind = backend_kind::in_tree;
  d.supported_transports = {transport::in_process, transport::inter_process, transport::tcp};
  d.synthetic = true;
  d.stub = timing;
  return d;
}

inline backend_descriptor adapter_descriptor(std::string name, std::vector<std::string> command,
                                             std::set<transport> transports = {
                                                 transport::inter_process, transport::tcp}) {
  if (command.empty()) fail(errc::usage_error, "adapter '" + name + "' has an empty command");
  backend_descriptor d;
  d.name = std::move(name);
  d.kind = backend_kind::subprocess_adapter;
  d.supported_transports = std::move(transports);
  d.adapter_command = std::move(command);
  return d;
}

class publisher {
public:
  virtual ~publisher() = default;
  // Enqueues one copy per currently connected subscriber; best effort,
  // a full subscriber queue drops the new message for that subscriber.
  virtual void send(std::span<const std::uint8_t> payload) = 0;
  virtual endpoint bound_endpoint() const = 0;
  // Flushes pending deliveries (bounded by flush_timeout) and releases
  // the endpoint. Idempotent.
  virtual void close() = 0;
};

enum class recv_kind {
  message,
  timed_out,   // no complete message within the timeout
  stream_end,  // publisher closed; no further messages will arrive
};

struct recv_result {
  recv_kind kind = recv_kind::timed_out;
  codec::payload_bytes bytes;
};

class subscriber {
public:
  virtual ~subscriber() = default;
  virtual recv_result receive(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

}  // namespace brokerbench
