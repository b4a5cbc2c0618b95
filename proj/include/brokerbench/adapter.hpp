// Subprocess adapter protocol. The harness launches one shim process
// per role:
//
//   <command> --role {pub|sub} --endpoint E --transport T
//             --count C --size P --interval-us T --delay-ms D
//
// and the shim performs the single-run experiment with the payload wire
// format from codec.hpp, then writes exactly one JSON document to
// standard output:
//
//   publisher:  {"schema":"1","first_send_ns":..,"last_send_ns":..,"sent":..}
//   subscriber: {"schema":"1","latencies_us":[..],"last_recv_ns":..,"received":..}
//
// Adding a messaging library to the suite means writing such a shim
// against its native API; nothing links into the harness.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brokerbench/backend.hpp"
#include "brokerbench/common.hpp"

namespace brokerbench {

struct publisher_report {
  std::uint64_t first_send_ns = 0;
  std::uint64_t last_send_ns = 0;
  std::uint64_t sent = 0;
  // Pacing quality, reported so schedule overshoot is auditable.
  std::uint64_t max_overshoot_ns = 0;
};

struct subscriber_report {
  std::vector<double> latencies_us;  // reception order
  std::uint64_t last_recv_ns = 0;
  std::uint64_t received = 0;
};

struct shim_params {
  std::uint64_t count = 0;
  std::size_t size = 0;
  std::uint64_t interval_us = 0;
  std::uint64_t delay_ms = 0;
};

inline std::vector<std::string> shim_argv(const std::vector<std::string>& command,
                                          const std::string& role, const endpoint& ep,
                                          const shim_params& params,
                                          const std::vector<std::string>& extra = {}) {
  std::vector<std::string> argv = command;
  argv.insert(argv.end(), {
                              "--role", role,
                              "--endpoint", ep.address,
                              "--transport", transport_name(ep.kind),
                              "--count", std::to_string(params.count),
                              "--size", std::to_string(params.size),
                              "--interval-us", std::to_string(params.interval_us),
                              "--delay-ms", std::to_string(params.delay_ms),
                          });
  argv.insert(argv.end(), extra.begin(), extra.end());
  return argv;
}

namespace adapter_detail {

inline nlohmann::json parse_report(const std::string& text, const char* role) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::adapter_protocol, std::string(role) + " shim emitted invalid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != std::string(kSchemaVersion)) {
    fail(errc::adapter_protocol,
         std::string(role) + " shim report missing schema \"" + kSchemaVersion + "\"");
  }
  return doc;
}

}  // namespace adapter_detail

inline publisher_report parse_publisher_report(const std::string& text) {
  const auto doc = adapter_detail::parse_report(text, "publisher");
  publisher_report rep;
  try {
    rep.first_send_ns = doc.at("first_send_ns").get<std::uint64_t>();
    rep.last_send_ns = doc.at("last_send_ns").get<std::uint64_t>();
    rep.sent = doc.at("sent").get<std::uint64_t>();
    rep.max_overshoot_ns = doc.value("max_overshoot_ns", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(errc::adapter_protocol, std::string("publisher report field: ") + e.what());
  }
  return rep;
}

inline subscriber_report parse_subscriber_report(const std::string& text) {
  const auto doc = adapter_detail::parse_report(text, "subscriber");
  subscriber_report rep;
  try {
    rep.latencies_us = doc.at("latencies_us").get<std::vector<double>>();
    rep.last_recv_ns = doc.at("last_recv_ns").get<std::uint64_t>();
    rep.received = doc.at("received").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::adapter_protocol, std::string("subscriber report field: ") + e.what());
  }
  if (rep.received != rep.latencies_us.size()) {
    fail(errc::adapter_protocol, "subscriber report: received count does not match series length");
  }
  return rep;
}

inline std::string publisher_report_json(const publisher_report& rep) {
  nlohmann::json doc{{"schema", kSchemaVersion},
                     {"first_send_ns", rep.first_send_ns},
                     {"last_send_ns", rep.last_send_ns},
                     {"sent", rep.sent},
                     {"max_overshoot_ns", rep.max_overshoot_ns}};
  return doc.dump();
}

inline std::string subscriber_report_json(const subscriber_report& rep) {
  nlohmann::json doc{{"schema", kSchemaVersion},
                     {"latencies_us", rep.latencies_us},
                     {"last_recv_ns", rep.last_recv_ns},
                     {"received", rep.received}};
  return doc.dump();
}

}  // namespace brokerbench
