// Adapter shim for the bundled reference bus. The harness launches one
// of these per role when a transport needs one process per role (ipc,
// tcp); it speaks the documented adapter contract: standard flags in,
// one JSON report on stdout.
#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "brokerbench/adapter.hpp"
#include "brokerbench/refbus.hpp"
#include "brokerbench/runner.hpp"

int main(int argc, char** argv) {
  using namespace brokerbench;
  CLI::App app{"refbus adapter shim"};
  std::string role, endpoint_str, transport_str;
  std::uint64_t count = 0, interval_us = 0, delay_ms = 0, receive_timeout_ms = 5000;
  std::size_t size = 0;
  bus_options options;
  app.add_option("--role", role)->required()->check(CLI::IsMember({"pub", "sub"}));
  app.add_option("--endpoint", endpoint_str)->required();
  app.add_option("--transport", transport_str)->required();
  app.add_option("--count", count)->required();
  app.add_option("--size", size)->required();
  app.add_option("--interval-us", interval_us)->required();
  app.add_option("--delay-ms", delay_ms)->required();
  // Internal knobs, not part of the adapter contract.
  app.add_option("--queue-capacity", options.queue_capacity);
  app.add_option("--tcp-buffer", options.tcp_buffer_bytes);
  app.add_option("--receive-timeout-ms", receive_timeout_ms);
  CLI11_PARSE(app, argc, argv);

  try {
    const endpoint ep{transport_from_name(transport_str), endpoint_str};
    if (role == "pub") {
      auto pub = refbus::bind_publisher(ep, options);
      const publisher_report rep = run_publisher(*pub, count, size, interval_us, delay_ms);
      pub->close();
      std::cout << publisher_report_json(rep) << std::endl;
    } else {
      auto sub = refbus::connect_subscriber(ep, options);
      const subscriber_report rep =
          run_subscriber(*sub, count, size, std::chrono::milliseconds(receive_timeout_ms));
      sub->close();
      std::cout << subscriber_report_json(rep) << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "shim " << role << " failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
