// Runs one experiment configuration R times and averages the results:
// subscribers first, then the publisher after its delay, with optional
// core pinning and resource sampling, per-run metrics from the raw
// reports, and the two-level subscriber/run averaging on top.
//
// Execution strategy by transport:
//   - in-process: publisher and subscribers are threads of this process
//     (the transport requires one address space);
//   - ipc / tcp: one process per role, launched through the adapter
//     shim protocol, so resource usage aggregates over real processes;
//   - synthetic backends (stub): inline simulation on a virtual clock,
//     bit-reproducible by construction.
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <latch>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "brokerbench/adapter.hpp"
#include "brokerbench/backend.hpp"
#include "brokerbench/clock.hpp"
#include "brokerbench/codec.hpp"
#include "brokerbench/metrics.hpp"
#include "brokerbench/pinning.hpp"
#include "brokerbench/refbus.hpp"
#include "brokerbench/sampler.hpp"
#include "brokerbench/serialize.hpp"
#include "brokerbench/subprocess.hpp"

namespace brokerbench {

struct experiment_config {
  backend_descriptor backend;
  transport transport_kind = transport::in_process;
  std::optional<endpoint> endpoint_override;
  std::uint64_t subscribers = 1;       // S
  std::uint64_t messages = 5000;       // C
  std::uint64_t interval_us = 1000;    // T; 0 = maximum achievable rate
  std::size_t payload_size = 32768;    // P
  std::uint64_t delay_ms = 1000;       // D, publisher start delay
  std::uint64_t repetitions = 4;       // R
  std::vector<int> cores;              // empty = pinning disabled
  std::uint64_t receive_timeout_ms = 5000;
  std::uint64_t sampler_interval_ms = 100;  // 0 = sampling disabled
};

inline void validate(const experiment_config& cfg) {
  if (cfg.subscribers < 1) fail(errc::usage_error, "subscribers must be >= 1");
  if (cfg.messages < 1) fail(errc::usage_error, "message count must be >= 1");
  if (cfg.payload_size < codec::kMinPayloadSize) {
    fail(errc::usage_error, "payload size must be >= " + std::to_string(codec::kMinPayloadSize) +
                                " bytes to carry the timestamp header");
  }
  if (cfg.repetitions < 1) fail(errc::usage_error, "repetitions must be >= 1");
  if (cfg.backend.name.empty()) fail(errc::usage_error, "backend name is empty");
  if (cfg.backend.kind == backend_kind::subprocess_adapter &&
      cfg.transport_kind == transport::in_process) {
    fail(errc::usage_error,
         "in-process transport cannot cross into an adapter subprocess: different address spaces");
  }
  if (!cfg.backend.supports(cfg.transport_kind)) {
    fail(errc::unsupported_transport, "backend '" + cfg.backend.name + "' does not support " +
                                          transport_name(cfg.transport_kind));
  }
  if (!cfg.backend.synthetic && cfg.transport_kind != transport::in_process &&
      cfg.backend.adapter_command.empty()) {
    fail(errc::usage_error, "backend '" + cfg.backend.name +
                                "' needs a shim command for process-per-role transports");
  }
  if (!cfg.cores.empty() && cfg.cores.size() < cfg.subscribers + 1) {
    fail(errc::usage_error, "core list must cover the publisher plus every subscriber (" +
                                std::to_string(cfg.subscribers + 1) + " cores)");
  }
  if (cfg.endpoint_override) {
    if (cfg.endpoint_override->kind != cfg.transport_kind) {
      fail(errc::usage_error, "endpoint transport does not match the configured transport");
    }
    validate_endpoint(*cfg.endpoint_override);
  }
}

// ---------------------------------------------------------------------------
// Algorithm-side loops, shared between the in-process path and the shim
// binary.

// Sleeps the start delay, then publishes `count` messages on an absolute
// schedule: send i targets first_send + i*interval, so the period stays
// `interval` regardless of per-send cost. Overshoot is recorded.
inline publisher_report run_publisher(publisher& pub, std::uint64_t count,
                                      std::size_t payload_size, std::uint64_t interval_us,
                                      std::uint64_t delay_ms) {
  sleep_ms(delay_ms);
  publisher_report rep;
  const std::uint64_t t0 = mono_clock_ns();
  for (std::uint64_t i = 0; i < count; ++i) {
    if (interval_us > 0 && i > 0) {
      const std::uint64_t target = t0 + i * interval_us * 1000;
      pace_until_mono(target);
      const std::uint64_t now = mono_clock_ns();
      if (now > target && now - target > rep.max_overshoot_ns) {
        rep.max_overshoot_ns = now - target;
      }
    }
    const std::uint64_t stamp = wall_clock_ns();
    const codec::payload_bytes payload = codec::encode(stamp, payload_size);
    pub.send(payload);
    if (i == 0) rep.first_send_ns = stamp;
    rep.last_send_ns = stamp;
    ++rep.sent;
  }
  return rep;
}

// Receives until `count` messages arrived, the stream ended, or the
// silence timeout expired (losses leave M < C; waiting for exactly C
// unconditionally would hang forever on a dropped message).
inline subscriber_report run_subscriber(subscriber& sub, std::uint64_t count,
                                        std::size_t payload_size,
                                        std::chrono::milliseconds silence_timeout) {
  subscriber_report rep;
  rep.latencies_us.reserve(count);
  while (rep.received < count) {
    recv_result r = sub.receive(silence_timeout);
    if (r.kind == recv_kind::timed_out || r.kind == recv_kind::stream_end) break;
    const std::uint64_t recv_wall = wall_clock_ns();
    const std::uint64_t sent_wall = codec::decode(r.bytes, payload_size);
    if (recv_wall < sent_wall) {
      fail(errc::clock_skew, "computed latency is negative; clock source bug");
    }
    rep.latencies_us.push_back(static_cast<double>(recv_wall - sent_wall) / 1000.0);
    rep.last_recv_ns = recv_wall;
    ++rep.received;
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct run_record {
  int run_index = 0;
  bool failed = false;
  std::string failure;
  publisher_report pub_report;
  std::vector<subscriber_report> sub_reports;
  std::vector<metrics::run_metrics> per_subscriber;
  metrics::run_metrics run_level;  // average over subscribers + cpu/mem medians
  resource_timeline timeline;
};

struct execute_result {
  metrics::run_metrics averaged;
  std::vector<run_record> runs;
  int failed_runs = 0;
  bool partial = false;
};

namespace runner_detail {

inline metrics::run_metrics subscriber_metrics(const publisher_report& pub,
                                               const subscriber_report& sub,
                                               std::uint64_t sent_count,
                                               std::size_t payload_size) {
  if (sub.received == 0) {
    fail(errc::empty_series, "subscriber received nothing: total message loss");
  }
  metrics::run_metrics m;
  m.latency = metrics::summarize(sub.latencies_us);
  if (sub.received >= 2) m.jitter_us = metrics::jitter(sub.latencies_us);
  m.throughput_mb_s = metrics::throughput_mb_per_s({.received = sub.received,
                                                    .payload_bytes = payload_size,
                                                    .first_send_ns = pub.first_send_ns,
                                                    .last_recv_ns = sub.last_recv_ns});
  m.received = static_cast<double>(sub.received);
  m.sent = static_cast<double>(sent_count);
  return m;
}

inline void finish_record(run_record& rec, const experiment_config& cfg) {
  rec.per_subscriber.clear();
  for (const subscriber_report& sub : rec.sub_reports) {
    rec.per_subscriber.push_back(
        subscriber_metrics(rec.pub_report, sub, cfg.messages, cfg.payload_size));
  }
  rec.run_level = metrics::average_subscribers(rec.per_subscriber);
  if (!rec.timeline.sample_times_ns.empty()) {
    try {
      const usage_medians medians = aggregate(rec.timeline);
      rec.run_level.cpu_median_pct = medians.cpu_median_pct;
      rec.run_level.mem_median_pct = medians.mem_median_pct;
    } catch (const bench_error&) {
      // Too short to produce a complete sample row; medians stay absent.
    }
  }
}

// Virtual epoch for synthetic runs; any fixed value works, this one is
// recognizably a wall-clock-like nanosecond stamp.
inline constexpr std::uint64_t kStubEpochNs = 1'700'000'000'000'000'000ull;

inline run_record run_synthetic(const experiment_config& cfg, int run_index) {
  run_record rec;
  rec.run_index = run_index;
  const std::uint64_t first_send = kStubEpochNs + cfg.delay_ms * 1'000'000;
  rec.pub_report.first_send_ns = first_send;
  rec.pub_report.last_send_ns = first_send + (cfg.messages - 1) * cfg.interval_us * 1000;
  rec.pub_report.sent = cfg.messages;
  const stub_timing& stub = cfg.backend.stub;
  for (std::uint64_t j = 0; j < cfg.subscribers; ++j) {
    const double delay_us = stub.base_delay_us + static_cast<double>(j) * stub.subscriber_step_us +
                            static_cast<double>(run_index) * stub.run_step_us;
    subscriber_report sub;
    sub.received = cfg.messages;
    sub.latencies_us.assign(cfg.messages, delay_us);
    sub.last_recv_ns =
        rec.pub_report.last_send_ns + static_cast<std::uint64_t>(delay_us * 1000.0);
    rec.sub_reports.push_back(std::move(sub));
  }
  finish_record(rec, cfg);
  return rec;
}

inline endpoint resolve_endpoint(const experiment_config& cfg,
                                 const std::filesystem::path& run_dir) {
  if (cfg.endpoint_override) {
    endpoint ep = *cfg.endpoint_override;
    // Port 0 means "pick one": resolve it here so that publisher and
    // subscriber processes agree on the concrete port.
    if (ep.kind == transport::tcp && ep.address.ends_with(":0")) {
      ep.address = ep.address.substr(0, ep.address.size() - 1) +
                   std::to_string(refbus::probe_free_tcp_port());
    }
    return ep;
  }
  endpoint ep;
  ep.kind = cfg.transport_kind;
  switch (cfg.transport_kind) {
    case transport::in_process:
      ep.address = "bench-" + refbus::unique_suffix();
      break;
    case transport::inter_process:
      ep.address = (run_dir / ("refbus-" + refbus::unique_suffix() + ".sock")).string();
      break;
    case transport::tcp:
      ep.address = "127.0.0.1:" + std::to_string(refbus::probe_free_tcp_port());
      break;
  }
  return ep;
}

inline run_record run_threaded(const experiment_config& cfg, int run_index) {
  run_record rec;
  rec.run_index = run_index;
  if (cfg.backend.name != "refbus") {
    fail(errc::usage_error, "no in-tree backend named '" + cfg.backend.name + "'");
  }
  const endpoint requested = resolve_endpoint(cfg, std::filesystem::temp_directory_path());
  auto pub = refbus::bind_publisher(requested, cfg.backend.options);
  const endpoint actual = pub->bound_endpoint();

  resource_sampler sampler;
  if (cfg.sampler_interval_ms > 0) {
    sampler.start({::getpid()}, std::chrono::milliseconds(cfg.sampler_interval_ms));
  }

  const auto sub_count = cfg.subscribers;
  std::latch connected(static_cast<std::ptrdiff_t>(sub_count));
  std::atomic<bool> connect_failed{false};
  std::vector<subscriber_report> reports(sub_count);
  std::vector<std::string> sub_errors(sub_count);
  std::vector<std::thread> sub_threads;
  sub_threads.reserve(sub_count);
  for (std::uint64_t j = 0; j < sub_count; ++j) {
    sub_threads.emplace_back([&, j] {
      std::unique_ptr<subscriber> sub;
      try {
        if (!cfg.cores.empty() && !pin_current_thread(cfg.cores[1 + j])) {
          fail(errc::usage_error, "cannot pin subscriber to core " +
                                      std::to_string(cfg.cores[1 + j]));
        }
        sub = refbus::connect_subscriber(actual, cfg.backend.options);
      } catch (const std::exception& e) {
        sub_errors[j] = e.what();
        connect_failed.store(true);
        connected.count_down();
        return;
      }
      connected.count_down();
      try {
        reports[j] = run_subscriber(*sub, cfg.messages, cfg.payload_size,
                                    std::chrono::milliseconds(cfg.receive_timeout_ms));
      } catch (const std::exception& e) {
        sub_errors[j] = e.what();
      }
      sub->close();
    });
  }

  std::string pub_error;
  std::thread pub_thread([&] {
    connected.wait();
    try {
      if (!cfg.cores.empty() && !pin_current_thread(cfg.cores[0])) {
        fail(errc::usage_error, "cannot pin publisher to core " + std::to_string(cfg.cores[0]));
      }
      if (!connect_failed.load()) {
        rec.pub_report = run_publisher(*pub, cfg.messages, cfg.payload_size, cfg.interval_us,
                                       cfg.delay_ms);
      }
    } catch (const std::exception& e) {
      pub_error = e.what();
    }
    pub->close();  // flush, then signal stream end to the subscribers
  });

  pub_thread.join();
  for (std::thread& t : sub_threads) t.join();
  if (cfg.sampler_interval_ms > 0) rec.timeline = sampler.stop();

  for (std::uint64_t j = 0; j < sub_count; ++j) {
    if (!sub_errors[j].empty()) {
      rec.failed = true;
      rec.failure = "subscriber " + std::to_string(j) + ": " + sub_errors[j];
      return rec;
    }
  }
  if (!pub_error.empty()) {
    rec.failed = true;
    rec.failure = "publisher: " + pub_error;
    return rec;
  }
  rec.sub_reports = std::move(reports);
  try {
    finish_record(rec, cfg);
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  return rec;
}

inline std::chrono::milliseconds subprocess_deadline(const experiment_config& cfg) {
  // Start delay + paced schedule + a transfer allowance for T=0 runs
  // (assuming a pessimistic 50 MB/s) + silence timeout + fixed margin.
  const double transfer_ms = static_cast<double>(cfg.messages) *
                             static_cast<double>(cfg.payload_size) / (50.0 * 1e6) * 1000.0;
  const std::uint64_t total = cfg.delay_ms + cfg.messages * cfg.interval_us / 1000 +
                              static_cast<std::uint64_t>(transfer_ms) + cfg.receive_timeout_ms +
                              15000;
  return std::chrono::milliseconds(total);
}

inline run_record run_subprocess(const experiment_config& cfg, int run_index,
                                 const std::filesystem::path& run_dir) {
  run_record rec;
  rec.run_index = run_index;
  const endpoint ep = resolve_endpoint(cfg, run_dir);
  const shim_params params{.count = cfg.messages,
                           .size = cfg.payload_size,
                           .interval_us = cfg.interval_us,
                           .delay_ms = cfg.delay_ms};
  std::vector<std::string> extra;
  if (cfg.backend.kind == backend_kind::in_tree) {
    // Internal knobs of the bundled shim; external shims only ever see
    // the standard contract flags.
    extra = {"--queue-capacity", std::to_string(cfg.backend.options.queue_capacity),
             "--tcp-buffer", std::to_string(cfg.backend.options.tcp_buffer_bytes),
             "--receive-timeout-ms", std::to_string(cfg.receive_timeout_ms)};
  }

  std::vector<child_process> subs;
  child_process pub;
  std::vector<int> pids;
  try {
    // Subscribers run first; they retry their connect until the
    // publisher binds, and the publisher sleeps D before sending.
    for (std::uint64_t j = 0; j < cfg.subscribers; ++j) {
      subs.push_back(child_process::spawn(
          shim_argv(cfg.backend.adapter_command, "sub", ep, params, extra)));
      if (!cfg.cores.empty() && !pin_process(subs.back().pid(), cfg.cores[1 + j])) {
        fail(errc::usage_error, "cannot pin subscriber process to core " +
                                    std::to_string(cfg.cores[1 + j]));
      }
      pids.push_back(subs.back().pid());
    }
    pub = child_process::spawn(shim_argv(cfg.backend.adapter_command, "pub", ep, params, extra));
    if (!cfg.cores.empty() && !pin_process(pub.pid(), cfg.cores[0])) {
      fail(errc::usage_error, "cannot pin publisher process to core " +
                                  std::to_string(cfg.cores[0]));
    }
    pids.push_back(pub.pid());
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure = std::string("spawn: ") + e.what();
    return rec;
  }

  resource_sampler sampler;
  if (cfg.sampler_interval_ms > 0) {
    sampler.start(pids, std::chrono::milliseconds(cfg.sampler_interval_ms));
  }

  std::vector<child_process*> all;
  for (child_process& c : subs) all.push_back(&c);
  all.push_back(&pub);
  const bool drained = drain_children(all, subprocess_deadline(cfg));
  if (cfg.sampler_interval_ms > 0) rec.timeline = sampler.stop();

  if (!drained) {
    for (child_process* c : all) c->kill_hard();
    rec.failed = true;
    rec.failure = "run exceeded its deadline; shims killed";
    return rec;
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int code = all[i]->wait(std::chrono::milliseconds(5000));
    if (code != 0) {
      rec.failed = true;
      rec.failure = (i < subs.size() ? "subscriber shim " + std::to_string(i)
                                     : std::string("publisher shim")) +
                    " exited with status " + std::to_string(code);
      return rec;
    }
  }

  try {
    rec.pub_report = parse_publisher_report(pub.output());
    for (child_process& c : subs) {
      rec.sub_reports.push_back(parse_subscriber_report(c.output()));
    }
    finish_record(rec, cfg);
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  return rec;
}

inline run_record run_once(const experiment_config& cfg, int run_index,
                           const std::filesystem::path& run_dir) {
  if (cfg.backend.synthetic) return run_synthetic(cfg, run_index);
  if (cfg.transport_kind == transport::in_process) return run_threaded(cfg, run_index);
  return run_subprocess(cfg, run_index, run_dir);
}

}  // namespace runner_detail

struct execute_options {
  // When set, raw material is archived per repetition: one latency CSV
  // per subscriber, the publisher report, the sampled timeline, and a
  // config snapshot at the top.
  std::filesystem::path archive_dir;
};

// Serializable snapshot of everything that shaped a run.
struct config_snapshot {
  std::string backend;
  std::string backend_kind;
  std::string transport;
  std::uint64_t subscribers = 0;
  std::uint64_t messages = 0;
  std::uint64_t interval_us = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t delay_ms = 0;
  std::uint64_t repetitions = 0;
  std::uint64_t queue_capacity = 0;
  std::int64_t tcp_buffer_bytes = 0;
  std::uint64_t receive_timeout_ms = 0;
  std::uint64_t sampler_interval_ms = 0;
  std::vector<int> cores;
};

inline config_snapshot snapshot_of(const experiment_config& cfg) {
  config_snapshot s;
  s.backend = cfg.backend.name;
  s.backend_kind = backend_kind_name(cfg.backend.kind);
  s.transport = transport_name(cfg.transport_kind);
  s.subscribers = cfg.subscribers;
  s.messages = cfg.messages;
  s.interval_us = cfg.interval_us;
  s.payload_bytes = cfg.payload_size;
  s.delay_ms = cfg.delay_ms;
  s.repetitions = cfg.repetitions;
  s.queue_capacity = cfg.backend.options.queue_capacity;
  s.tcp_buffer_bytes = cfg.backend.options.tcp_buffer_bytes;
  s.receive_timeout_ms = cfg.receive_timeout_ms;
  s.sampler_interval_ms = cfg.sampler_interval_ms;
  s.cores = cfg.cores;
  return s;
}

inline void to_json(nlohmann::json& j, const config_snapshot& s) {
  j = nlohmann::json{{"backend", s.backend},
                     {"backend_kind", s.backend_kind},
                     {"transport", s.transport},
                     {"subscribers", s.subscribers},
                     {"messages", s.messages},
                     {"interval_us", s.interval_us},
                     {"payload_bytes", s.payload_bytes},
                     {"delay_ms", s.delay_ms},
                     {"repetitions", s.repetitions},
                     {"queue_capacity", s.queue_capacity},
                     {"tcp_buffer_bytes", s.tcp_buffer_bytes},
                     {"receive_timeout_ms", s.receive_timeout_ms},
                     {"sampler_interval_ms", s.sampler_interval_ms},
                     {"cores", s.cores}};
}

inline void from_json(const nlohmann::json& j, config_snapshot& s) {
  j.at("backend").get_to(s.backend);
  j.at("backend_kind").get_to(s.backend_kind);
  j.at("transport").get_to(s.transport);
  j.at("subscribers").get_to(s.subscribers);
  j.at("messages").get_to(s.messages);
  j.at("interval_us").get_to(s.interval_us);
  j.at("payload_bytes").get_to(s.payload_bytes);
  j.at("delay_ms").get_to(s.delay_ms);
  j.at("repetitions").get_to(s.repetitions);
  j.at("queue_capacity").get_to(s.queue_capacity);
  j.at("tcp_buffer_bytes").get_to(s.tcp_buffer_bytes);
  j.at("receive_timeout_ms").get_to(s.receive_timeout_ms);
  j.at("sampler_interval_ms").get_to(s.sampler_interval_ms);
  j.at("cores").get_to(s.cores);
}

namespace runner_detail {

inline void archive_run(const std::filesystem::path& dir, const run_record& rec) {
  namespace fs = std::filesystem;
  const fs::path rep_dir = dir / ("rep" + std::to_string(rec.run_index));
  fs::create_directories(rep_dir);
  for (std::size_t j = 0; j < rec.sub_reports.size(); ++j) {
    write_text_file((rep_dir / ("sub" + std::to_string(j) + "_latencies.csv")).string(),
                    latency_series_csv(rec.sub_reports[j].latencies_us));
  }
  nlohmann::json pubdoc{{"schema", kSchemaVersion},
                        {"first_send_ns", rec.pub_report.first_send_ns},
                        {"last_send_ns", rec.pub_report.last_send_ns},
                        {"sent", rec.pub_report.sent},
                        {"max_overshoot_ns", rec.pub_report.max_overshoot_ns},
                        {"uss_degraded", rec.timeline.uss_degraded},
                        {"failed", rec.failed},
                        {"failure", rec.failure}};
  write_text_file((rep_dir / "publisher.json").string(), pubdoc.dump(2) + "\n");
  write_text_file((rep_dir / "timeline.csv").string(), timeline_csv(rec.timeline));
}

}  // namespace runner_detail

inline execute_result execute(const experiment_config& cfg, const execute_options& options = {}) {
  validate(cfg);
  namespace fs = std::filesystem;
  fs::path run_dir = options.archive_dir;
  if (run_dir.empty()) {
    run_dir = fs::temp_directory_path();
  } else {
    fs::create_directories(run_dir);
    nlohmann::json cfgdoc = snapshot_of(cfg);
    cfgdoc["schema"] = kSchemaVersion;
    cfgdoc["suite_version"] = kVersion;
    write_text_file((run_dir / "config.json").string(), cfgdoc.dump(2) + "\n");
  }

  execute_result result;
  for (std::uint64_t r = 0; r < cfg.repetitions; ++r) {
    run_record rec = runner_detail::run_once(cfg, static_cast<int>(r), run_dir);
    if (rec.failed && !cfg.backend.synthetic) {
      // One retry before a repetition counts as failed.
      run_record retry = runner_detail::run_once(cfg, static_cast<int>(r), run_dir);
      if (!retry.failed) rec = std::move(retry);
    }
    if (!options.archive_dir.empty()) runner_detail::archive_run(options.archive_dir, rec);
    if (rec.failed) ++result.failed_runs;
    result.runs.push_back(std::move(rec));
  }

  std::vector<metrics::run_metrics> per_run;
  for (const run_record& rec : result.runs) {
    if (!rec.failed) per_run.push_back(rec.run_level);
  }
  if (per_run.empty()) {
    std::string detail = result.runs.empty() ? "" : result.runs.front().failure;
    fail(errc::all_runs_failed, "every repetition failed: " + detail);
  }
  result.partial = result.failed_runs > 0;
  result.averaged = metrics::average_runs(per_run);
  return result;
}

// Looks for the bundled refbus shim next to the running executable,
// then on PATH. Returns an empty vector when it cannot be found.
inline std::vector<std::string> locate_refbus_shim() {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const fs::path candidate = self.parent_path() / "brokerbench-shim";
    if (fs::exists(candidate)) return {candidate.string()};
  }
  const char* path_env = std::getenv("PATH");
  if (path_env != nullptr) {
    std::string path(path_env);
    std::size_t start = 0;
    while (start <= path.size()) {
      const std::size_t end = path.find(':', start);
      const std::string dir = path.substr(start, end == std::string::npos ? end : end - start);
      if (!dir.empty()) {
        const fs::path candidate = fs::path(dir) / "brokerbench-shim";
        if (fs::exists(candidate)) return {candidate.string()};
      }
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return {};
}

}  // namespace brokerbench
