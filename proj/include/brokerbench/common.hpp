// Project-wide constants and the error type shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace brokerbench {

inline constexpr const char* kVersion = "0.1.0";

// Result schema version stamped into every JSON document this suite
// emits or parses (rows, adapter reports, optimality maps).
inline constexpr const char* kSchemaVersion = "1";

enum class errc {
  // metrics
  empty_series,
  insufficient_samples,
  zero_span,
  no_messages,
  empty_list,
  // codec
  payload_too_small,
  malformed_payload,
  // backend / refbus
  invalid_endpoint,
  unsupported_transport,
  address_in_use,
  permission_denied,
  path_too_long,
  duplicate_name,
  connection_refused,
  handle_closed,
  send_failed,
  // sampler
  no_such_process,
  sampling_unsupported,
  empty_timeline,
  // runner / sweep
  all_runs_failed,
  clock_skew,
  incomplete_grid,
  adapter_protocol,
  // cli / io
  usage_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_series: return "empty_series";
    case errc::insufficient_samples: return "insufficient_samples";
    case errc::zero_span: return "zero_span";
    case errc::no_messages: return "no_messages";
    case errc::empty_list: return "empty_list";
    case errc::payload_too_small: return "payload_too_small";
    case errc::malformed_payload: return "malformed_payload";
    case errc::invalid_endpoint: return "invalid_endpoint";
    case errc::unsupported_transport: return "unsupported_transport";
    case errc::address_in_use: return "address_in_use";
    case errc::permission_denied: return "permission_denied";
    case errc::path_too_long: return "path_too_long";
    case errc::duplicate_name: return "duplicate_name";
    case errc::connection_refused: return "connection_refused";
    case errc::handle_closed: return "handle_closed";
    case errc::send_failed: return "send_failed";
    case errc::no_such_process: return "no_such_process";
    case errc::sampling_unsupported: return "sampling_unsupported";
    case errc::empty_timeline: return "empty_timeline";
    case errc::all_runs_failed: return "all_runs_failed";
    case errc::clock_skew: return "clock_skew";
    case errc::incomplete_grid: return "incomplete_grid";
    case errc::adapter_protocol: return "adapter_protocol";
    case errc::usage_error: return "usage_error";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

class bench_error : public std::runtime_error {
public:
  bench_error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw bench_error(code, what);
}

}  // namespace brokerbench
