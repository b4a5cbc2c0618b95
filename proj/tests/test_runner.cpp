#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "brokerbench/runner.hpp"

using namespace brokerbench;
namespace fs = std::filesystem;

#ifndef BROKERBENCH_SHIM_PATH
#define BROKERBENCH_SHIM_PATH "brokerbench-shim"
#endif

namespace {

experiment_config stub_config() {
  experiment_config cfg;
  cfg.backend = stub_descriptor();
  cfg.messages = 100;
  cfg.subscribers = 2;
  cfg.repetitions = 2;
  cfg.delay_ms = 0;
  cfg.sampler_interval_ms = 0;
  return cfg;
}

experiment_config refbus_config(transport t) {
  experiment_config cfg;
  cfg.backend = refbus_descriptor({}, {BROKERBENCH_SHIM_PATH});
  cfg.transport_kind = t;
  cfg.subscribers = 2;
  cfg.messages = 60;
  cfg.interval_us = 200;
  cfg.payload_size = 512;
  cfg.delay_ms = t == transport::in_process ? 0 : 150;
  cfg.repetitions = 1;
  cfg.sampler_interval_ms = 0;
  cfg.receive_timeout_ms = 3000;
  return cfg;
}

nlohmann::json result_fingerprint(const execute_result& result) {
  nlohmann::json doc;
  doc["averaged"] = result.averaged;
  for (const run_record& rec : result.runs) {
    nlohmann::json r{{"failed", rec.failed},
                     {"first_send_ns", rec.pub_report.first_send_ns},
                     {"last_send_ns", rec.pub_report.last_send_ns}};
    for (const auto& sub : rec.sub_reports) {
      r["subs"].push_back(nlohmann::json{{"received", sub.received},
                                         {"last_recv_ns", sub.last_recv_ns},
                                         {"latencies", sub.latencies_us}});
    }
    r["metrics"].push_back(nlohmann::json(rec.run_level));
    doc["runs"].push_back(std::move(r));
  }
  return doc;
}

}  // namespace

TEST_CASE("config validation rejects the documented invalid shapes") {
  experiment_config cfg = stub_config();

  SUBCASE("zero subscribers") {
    cfg.subscribers = 0;
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("zero messages") {
    cfg.messages = 0;
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("payload below the header minimum") {
    cfg.payload_size = 8;
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("zero repetitions") {
    cfg.repetitions = 0;
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("adapter over in-process is impossible") {
    cfg.backend = adapter_descriptor("x", {"/bin/true"},
                                     {transport::in_process, transport::tcp});
    cfg.transport_kind = transport::in_process;
    try {
      validate(cfg);
      FAIL("expected a usage error");
    } catch (const bench_error& e) {
      CHECK(e.code() == errc::usage_error);
    }
  }
  SUBCASE("unsupported transport") {
    cfg.backend = adapter_descriptor("x", {"/bin/true"}, {transport::tcp});
    cfg.transport_kind = transport::inter_process;
    try {
      validate(cfg);
      FAIL("expected unsupported_transport");
    } catch (const bench_error& e) {
      CHECK(e.code() == errc::unsupported_transport);
    }
  }
  SUBCASE("core list shorter than publisher + subscribers") {
    cfg.cores = {0, 1};  // S=2 needs 3
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("refbus over tcp without a shim command") {
    cfg.backend = refbus_descriptor({}, {});
    cfg.transport_kind = transport::tcp;
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
  SUBCASE("endpoint transport mismatch") {
    cfg.endpoint_override = endpoint{transport::tcp, "127.0.0.1:5555"};
    CHECK_THROWS_AS(validate(cfg), bench_error);
  }
}

TEST_CASE("stub pipeline: fixed delay flows through both averaging levels") {
  experiment_config cfg = stub_config();  // base delay 10us, steps 0
  const execute_result result = execute(cfg);
  CHECK(result.averaged.latency.avg_us == 10.0);
  CHECK(result.averaged.latency.min_us == 10.0);
  CHECK(result.averaged.latency.max_us == 10.0);
  REQUIRE(result.averaged.jitter_us.has_value());
  CHECK(*result.averaged.jitter_us == 0.0);
  CHECK(result.averaged.received == 100.0);
  CHECK(result.averaged.sent == 100.0);
  CHECK_FALSE(result.partial);
  CHECK(result.averaged.throughput_mb_s > 0);
}

TEST_CASE("stub pipeline: two-level mean equals the hand-computed value") {
  experiment_config cfg = stub_config();
  cfg.backend.stub = {.base_delay_us = 10, .subscriber_step_us = 10, .run_step_us = 5};
  // run 0 subscribers: 10, 20 -> 15; run 1: 15, 25 -> 20; runs: 17.5.
  const execute_result result = execute(cfg);
  CHECK(result.runs[0].per_subscriber[0].latency.avg_us == 10.0);
  CHECK(result.runs[0].per_subscriber[1].latency.avg_us == 20.0);
  CHECK(result.runs[0].run_level.latency.avg_us == 15.0);
  CHECK(result.runs[1].run_level.latency.avg_us == 20.0);
  CHECK(result.averaged.latency.avg_us == 17.5);
}

TEST_CASE("stub pipeline output is bit-reproducible") {
  experiment_config cfg = stub_config();
  cfg.backend.stub = {.base_delay_us = 12.5, .subscriber_step_us = 3.25, .run_step_us = 1.75};
  const std::string a = result_fingerprint(execute(cfg)).dump();
  const std::string b = result_fingerprint(execute(cfg)).dump();
  CHECK(a == b);
}

TEST_CASE("single message leaves jitter absent, not zero") {
  experiment_config cfg = stub_config();
  cfg.subscribers = 1;
  cfg.messages = 1;
  cfg.repetitions = 1;
  const execute_result result = execute(cfg);
  CHECK(result.averaged.received == 1.0);
  CHECK_FALSE(result.averaged.jitter_us.has_value());
}

TEST_CASE("threaded in-process run is loss-free at a paced rate") {
  const experiment_config cfg = refbus_config(transport::in_process);
  const execute_result result = execute(cfg);
  CHECK_FALSE(result.partial);
  CHECK(result.averaged.received == 60.0);
  CHECK(result.averaged.sent == 60.0);
  CHECK(result.averaged.latency.avg_us > 0.0);
  CHECK(result.averaged.latency.min_us <= result.averaged.latency.avg_us);
  CHECK(result.averaged.latency.avg_us <= result.averaged.latency.max_us);
  REQUIRE(result.averaged.jitter_us.has_value());
  CHECK(result.runs[0].sub_reports.size() == 2);
}

TEST_CASE("core pinning applies when a core list is configured") {
  experiment_config cfg = refbus_config(transport::in_process);
  cfg.subscribers = 1;
  cfg.messages = 20;
  cfg.cores = {0, 1};  // publisher on 0, the subscriber on 1
  const execute_result result = execute(cfg);
  CHECK(result.averaged.received == 20.0);

  cfg.cores = {0, 4096};  // no such core: the run must fail loudly
  cfg.repetitions = 1;
  CHECK_THROWS_AS(execute(cfg), bench_error);
}

TEST_CASE("an explicit tcp endpoint with port 0 is resolved before use") {
  experiment_config cfg = refbus_config(transport::tcp);
  cfg.subscribers = 1;
  cfg.messages = 30;
  cfg.endpoint_override = endpoint{transport::tcp, "127.0.0.1:0"};
  const execute_result result = execute(cfg);
  CHECK(result.averaged.received == 30.0);
}

TEST_CASE("threaded run with sampling attaches cpu and memory medians") {
  experiment_config cfg = refbus_config(transport::in_process);
  cfg.messages = 40;
  cfg.interval_us = 5000;  // ~200ms run
  cfg.sampler_interval_ms = 25;
  const execute_result result = execute(cfg);
  REQUIRE(result.averaged.cpu_median_pct.has_value());
  REQUIRE(result.averaged.mem_median_pct.has_value());
  CHECK(*result.averaged.cpu_median_pct >= 0.0);
  CHECK(*result.averaged.mem_median_pct > 0.0);
}

TEST_CASE("subprocess run over ipc via the bundled shim") {
  const experiment_config cfg = refbus_config(transport::inter_process);
  const execute_result result = execute(cfg);
  CHECK_FALSE(result.partial);
  CHECK(result.averaged.received == 60.0);
  CHECK(result.averaged.latency.avg_us > 0.0);
}

TEST_CASE("subprocess run over tcp via the bundled shim, with sampling") {
  experiment_config cfg = refbus_config(transport::tcp);
  cfg.messages = 80;
  cfg.interval_us = 3000;  // ~240ms run so the sampler gets rows
  cfg.sampler_interval_ms = 25;
  const execute_result result = execute(cfg);
  CHECK_FALSE(result.partial);
  CHECK(result.averaged.received == 80.0);
  // Three processes were sampled: one publisher and two subscribers.
  CHECK(result.runs[0].timeline.per_process.size() == 3);
  REQUIRE(result.averaged.cpu_median_pct.has_value());
}

TEST_CASE("archive directory holds the raw material") {
  const fs::path dir = fs::temp_directory_path() / ("bench-archive-" + refbus::unique_suffix());
  experiment_config cfg = refbus_config(transport::in_process);
  cfg.repetitions = 2;
  execute_options opts;
  opts.archive_dir = dir;
  execute(cfg, opts);
  CHECK(fs::exists(dir / "config.json"));
  for (int r = 0; r < 2; ++r) {
    const fs::path rep = dir / ("rep" + std::to_string(r));
    CHECK(fs::exists(rep / "publisher.json"));
    CHECK(fs::exists(rep / "timeline.csv"));
    CHECK(fs::exists(rep / "sub0_latencies.csv"));
    CHECK(fs::exists(rep / "sub1_latencies.csv"));
  }
  std::ifstream sub_csv(dir / "rep0" / "sub0_latencies.csv");
  std::string header;
  std::getline(sub_csv, header);
  CHECK(header == "latency_us");
  fs::remove_all(dir);
}

TEST_CASE("a broken shim command fails every run and raises all_runs_failed") {
  experiment_config cfg = refbus_config(transport::tcp);
  cfg.backend.adapter_command = {"/nonexistent-shim-binary"};
  cfg.repetitions = 2;
  cfg.receive_timeout_ms = 500;
  try {
    execute(cfg);
    FAIL("expected all_runs_failed");
  } catch (const bench_error& e) {
    CHECK(e.code() == errc::all_runs_failed);
  }
}
