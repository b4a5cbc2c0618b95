// Command-line front end: run / sweep / analyze / report / list-backends.
// Kept in a header so the parsing and validation logic is unit-testable;
// tools/brokerbench.cpp is a thin main().
//
// Exit codes: 0 success, 1 usage error, 2 failure (including every
// repetition failing), 3 completed with flagged failures.
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brokerbench/report.hpp"
#include "brokerbench/runner.hpp"
#include "brokerbench/sweep.hpp"

namespace brokerbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitPartial = 3;

namespace cli_detail {

inline std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::string tok;
  for (char c : text + ",") {
    if (c == ',') {
      if (!tok.empty()) {
        try {
          out.push_back(std::stoull(tok));
        } catch (const std::exception&) {
          fail(errc::usage_error, std::string("bad ") + what + " value '" + tok + "'");
        }
        tok.clear();
      }
    } else {
      tok += c;
    }
  }
  if (out.empty()) fail(errc::usage_error, std::string("empty ") + what + " list");
  return out;
}

inline std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string tok;
  for (char c : text + ",") {
    if (c == ',') {
      if (!tok.empty()) out.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  return out;
}

struct backend_registry {
  bus_options options;
  std::vector<std::string> refbus_shim;
  std::map<std::string, std::vector<std::string>> adapters;  // name -> command

  backend_descriptor resolve(const std::string& name) const {
    if (name == "refbus") {
      auto shim = refbus_shim.empty() ? locate_refbus_shim() : refbus_shim;
      return refbus_descriptor(options, std::move(shim));
    }
    if (name == "stub") return stub_descriptor();
    const auto it = adapters.find(name);
    if (it == adapters.end()) {
      fail(errc::usage_error,
           "unknown backend '" + name + "' (bundled: refbus, stub; adapters come from --adapter)");
    }
    return adapter_descriptor(name, it->second);
  }
};

inline void add_adapters(backend_registry& reg, const std::vector<std::string>& adapter_flags) {
  for (const std::string& entry : adapter_flags) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      fail(errc::usage_error, "--adapter expects NAME=COMMAND, got '" + entry + "'");
    }
    reg.adapters[entry.substr(0, eq)] = split_command(entry.substr(eq + 1));
  }
}

inline nlohmann::json run_result_json(const config_snapshot& cfg, const execute_result& result) {
  nlohmann::json runs = nlohmann::json::array();
  for (const run_record& rec : result.runs) {
    nlohmann::json r{{"run_index", rec.run_index},
                     {"failed", rec.failed},
                     {"failure", rec.failure},
                     {"max_overshoot_ns", rec.pub_report.max_overshoot_ns},
                     {"uss_degraded", rec.timeline.uss_degraded}};
    if (!rec.failed) r["metrics"] = rec.run_level;
    runs.push_back(std::move(r));
  }
  return nlohmann::json{{"schema", kSchemaVersion}, {"config", cfg},
                        {"averaged", result.averaged}, {"failed_runs", result.failed_runs},
                        {"partial", result.partial},  {"runs", runs}};
}

inline void print_metrics_line(std::ostream& out, const metrics::run_metrics& m) {
  out << "  latency us (min/avg/p90/p99/max): " << format_number(m.latency.min_us) << " / "
      << format_number(m.latency.avg_us) << " / " << format_number(m.latency.p90_us) << " / "
      << format_number(m.latency.p99_us) << " / " << format_number(m.latency.max_us) << "\n";
  out << "  throughput: " << format_number(m.throughput_mb_s) << " MB/s\n";
  out << "  jitter: " << (m.jitter_us ? format_number(*m.jitter_us) + " us" : "n/a") << "\n";
  out << "  received/sent: " << format_number(m.received) << " / " << format_number(m.sent)
      << "\n";
  out << "  cpu median: " << (m.cpu_median_pct ? format_number(*m.cpu_median_pct) + " %" : "n/a")
      << ", mem median: "
      << (m.mem_median_pct ? format_number(*m.mem_median_pct) + " %" : "n/a") << "\n";
}

inline sweep_spec load_sweep_spec(const std::filesystem::path& file, backend_registry& reg) {
  std::ifstream in(file);
  if (!in) fail(errc::usage_error, "cannot open sweep spec file '" + file.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::usage_error, "sweep spec is not valid JSON: " + std::string(e.what()));
  }
  sweep_spec spec;
  try {
    if (doc.contains("adapters")) {
      for (const auto& [name, cmd] : doc.at("adapters").items()) {
        reg.adapters[name] = split_command(cmd.get<std::string>());
      }
    }
    if (doc.contains("queue_capacity")) {
      reg.options.queue_capacity = doc.at("queue_capacity").get<std::size_t>();
    }
    if (doc.contains("tcp_buffer_bytes")) {
      reg.options.tcp_buffer_bytes = doc.at("tcp_buffer_bytes").get<int>();
    }
    if (doc.contains("refbus_shim")) {
      reg.refbus_shim = split_command(doc.at("refbus_shim").get<std::string>());
    }
    for (const auto& name : doc.at("backends").get<std::vector<std::string>>()) {
      spec.backends.push_back(reg.resolve(name));
    }
    for (const auto& name : doc.at("transports").get<std::vector<std::string>>()) {
      spec.transports.push_back(transport_from_name(name));
    }
    spec.intervals_us = doc.at("intervals_us").get<std::vector<std::uint64_t>>();
    spec.payload_sizes = doc.at("payload_sizes").get<std::vector<std::uint64_t>>();
    spec.subscriber_counts = doc.at("subscriber_counts").get<std::vector<std::uint64_t>>();
    spec.messages = doc.value("messages", spec.messages);
    spec.delay_ms = doc.value("delay_ms", spec.delay_ms);
    spec.repetitions = doc.value("repetitions", spec.repetitions);
    spec.receive_timeout_ms = doc.value("receive_timeout_ms", spec.receive_timeout_ms);
    spec.sampler_interval_ms = doc.value("sampler_interval_ms", spec.sampler_interval_ms);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::usage_error, "sweep spec field: " + std::string(e.what()));
  }
  return spec;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"brokerbench: a benchmarking suite for brokerless PUB/SUB messaging"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  bool json_mode = false;
  app.add_flag("--json", json_mode, "machine-readable output");

  // --- run ------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run one experiment configuration R times");
  std::string backend_name = "refbus";
  std::string transport_str = "inproc";
  std::string endpoint_str, profile, cores_str, out_dir, shim_str;
  std::vector<std::string> adapter_flags;
  experiment_config run_cfg;  // carries the Table-III-equivalent defaults
  std::uint64_t queue_capacity = bus_options{}.queue_capacity;
  int tcp_buffer = bus_options{}.tcp_buffer_bytes;
  bool dry_run = false, no_sampler = false;
  run_cmd->add_option("--backend", backend_name, "backend name (refbus, stub, or adapter)")
      ->capture_default_str();
  run_cmd->add_option("--transport", transport_str, "inproc | ipc | tcp")->capture_default_str();
  run_cmd->add_option("--endpoint", endpoint_str, "explicit endpoint address");
  run_cmd->add_option("--subscribers", run_cfg.subscribers, "number of subscribers S")
      ->capture_default_str();
  run_cmd->add_option("--count", run_cfg.messages, "messages sent C")->capture_default_str();
  run_cmd->add_option("--size", run_cfg.payload_size, "payload size P in bytes")
      ->capture_default_str();
  auto* interval_opt = run_cmd->add_option("--interval-us", run_cfg.interval_us,
                                           "publishing interval T in microseconds (0 = max rate)")
                           ->capture_default_str();
  run_cmd->add_option("--delay-ms", run_cfg.delay_ms, "publisher start delay D in milliseconds")
      ->capture_default_str();
  run_cmd->add_option("--repetitions", run_cfg.repetitions, "repetitions R")
      ->capture_default_str();
  run_cmd->add_option("--profile", profile,
                      "preset publishing interval: latency (T=1000us), throughput or cpu (T=0)");
  run_cmd->add_option("--receive-timeout-ms", run_cfg.receive_timeout_ms,
                      "subscriber silence timeout")
      ->capture_default_str();
  run_cmd->add_option("--sampler-interval-ms", run_cfg.sampler_interval_ms,
                      "resource sampling period (0 = off)")
      ->capture_default_str();
  run_cmd->add_flag("--no-sampler", no_sampler, "disable CPU/memory sampling");
  run_cmd->add_option("--queue-capacity", queue_capacity, "refbus per-subscriber queue capacity")
      ->capture_default_str();
  run_cmd->add_option("--tcp-buffer", tcp_buffer, "refbus TCP socket buffer bytes")
      ->capture_default_str();
  run_cmd->add_option("--cores", cores_str,
                      "comma-separated core ids, publisher first (default: BROKERBENCH_CORES)");
  run_cmd->add_option("--adapter", adapter_flags, "register adapter backend as NAME=COMMAND");
  run_cmd->add_option("--refbus-shim", shim_str, "path to the refbus shim binary");
  run_cmd->add_option("--out", out_dir, "archive directory for raw per-run material");
  run_cmd->add_flag("--dry-run", dry_run, "validate and print the resolved config, do not run");

  // --- sweep ----------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "run the cartesian parameter sweep from a spec");
  std::string spec_file, sweep_out, sweep_backends, sweep_transports, sweep_payloads,
      sweep_subs, sweep_intervals, sweep_cores;
  std::vector<std::string> sweep_adapter_flags;
  std::optional<std::uint64_t> sweep_count, sweep_delay, sweep_reps, sweep_sampler;
  bool sweep_force = false;
  sweep_cmd->add_option("--spec", spec_file, "sweep spec file (JSON)")->required();
  sweep_cmd->add_option("--out", sweep_out, "results directory (default results/<spec-stem>)");
  sweep_cmd->add_option("--backends", sweep_backends, "override: comma-separated backend names");
  sweep_cmd->add_option("--transports", sweep_transports, "override: comma-separated transports");
  sweep_cmd->add_option("--payload-sizes", sweep_payloads, "override: comma-separated bytes");
  sweep_cmd->add_option("--subscriber-counts", sweep_subs, "override: comma-separated counts");
  sweep_cmd->add_option("--intervals-us", sweep_intervals, "override: comma-separated intervals");
  sweep_cmd->add_option("--count", sweep_count, "override: messages per run");
  sweep_cmd->add_option("--delay-ms", sweep_delay, "override: publisher delay");
  sweep_cmd->add_option("--repetitions", sweep_reps, "override: repetitions");
  sweep_cmd->add_option("--sampler-interval-ms", sweep_sampler, "override: sampling period");
  sweep_cmd->add_option("--cores", sweep_cores, "core ids, publisher first");
  sweep_cmd->add_option("--adapter", sweep_adapter_flags, "register adapter as NAME=COMMAND");
  sweep_cmd->add_flag("--force", sweep_force, "rerun configurations already persisted");

  // --- analyze --------------------------------------------------------
  auto* analyze_cmd = app.add_subcommand("analyze", "compute optimality maps from sweep results");
  std::string results_dir;
  std::vector<std::string> metrics_req;
  std::optional<std::uint64_t> interval_filter;
  analyze_cmd->add_option("--results", results_dir, "results directory")->required();
  analyze_cmd->add_option("--metric", metrics_req,
                          "metric to map (latency, throughput, cpu, jitter, memory, ...)");
  analyze_cmd->add_option("--interval-us", interval_filter,
                          "restrict to rows with this publishing interval");

  // --- report ---------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "emit CSV tables and SVG figures");
  std::string report_dir;
  std::optional<std::uint64_t> report_interval;
  report_cmd->add_option("--results", report_dir, "results directory")->required();
  report_cmd->add_option("--interval-us", report_interval,
                         "interval used for the optimality maps");

  // --- list-backends ----------------------------------------------------
  auto* list_cmd = app.add_subcommand("list-backends", "show bundled and registered backends");
  std::vector<std::string> list_adapter_flags;
  list_cmd->add_option("--adapter", list_adapter_flags, "register adapter as NAME=COMMAND");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(run_cmd)) {
      if (!profile.empty()) {
        if (profile != "latency" && profile != "throughput" && profile != "cpu") {
          fail(errc::usage_error, "unknown profile '" + profile + "'");
        }
        // Throughput and CPU profiles publish at maximum rate; a pacing
        // cap would bound the measured throughput.
        if (interval_opt->count() == 0) {
          run_cfg.interval_us = profile == "latency" ? 1000 : 0;
        }
      }
      backend_registry reg;
      reg.options.queue_capacity = queue_capacity;
      reg.options.tcp_buffer_bytes = tcp_buffer;
      if (!shim_str.empty()) reg.refbus_shim = split_command(shim_str);
      add_adapters(reg, adapter_flags);
      run_cfg.backend = reg.resolve(backend_name);
      run_cfg.transport_kind = transport_from_name(transport_str);
      if (!endpoint_str.empty()) {
        run_cfg.endpoint_override = endpoint{run_cfg.transport_kind, endpoint_str};
      }
      if (no_sampler) run_cfg.sampler_interval_ms = 0;
      run_cfg.cores = cores_str.empty() ? cores_from_env() : parse_core_list(cores_str);
      validate(run_cfg);
      if (dry_run) {
        nlohmann::json doc = snapshot_of(run_cfg);
        doc["dry_run"] = true;
        out << (json_mode ? doc.dump() : doc.dump(2)) << "\n";
        return kExitOk;
      }
      execute_options opts;
      if (!out_dir.empty()) opts.archive_dir = out_dir;
      const execute_result result = execute(run_cfg, opts);
      if (json_mode) {
        out << run_result_json(snapshot_of(run_cfg), result).dump() << "\n";
      } else {
        out << "config: backend=" << backend_name << " transport=" << transport_str
            << " S=" << run_cfg.subscribers << " C=" << run_cfg.messages
            << " P=" << run_cfg.payload_size << " T=" << run_cfg.interval_us
            << "us D=" << run_cfg.delay_ms << "ms R=" << run_cfg.repetitions << "\n";
        for (const run_record& rec : result.runs) {
          out << "rep " << rec.run_index << ": "
              << (rec.failed ? "FAILED (" + rec.failure + ")"
                             : "M=" + format_number(rec.run_level.received) +
                                   " avg=" + format_number(rec.run_level.latency.avg_us) + "us")
              << "\n";
        }
        out << "averaged over " << (result.runs.size() - result.failed_runs) << " runs:\n";
        print_metrics_line(out, result.averaged);
        if (!out_dir.empty()) out << "raw material archived under " << out_dir << "\n";
      }
      return result.partial ? kExitPartial : kExitOk;
    }

    if (app.got_subcommand(sweep_cmd)) {
      backend_registry reg;
      add_adapters(reg, sweep_adapter_flags);
      sweep_spec spec = load_sweep_spec(spec_file, reg);
      if (!sweep_backends.empty()) {
        spec.backends.clear();
        for (const std::string& n : split_csv(sweep_backends)) {
          spec.backends.push_back(reg.resolve(n));
        }
      }
      if (!sweep_transports.empty()) {
        spec.transports.clear();
        for (const std::string& n : split_csv(sweep_transports)) {
          spec.transports.push_back(transport_from_name(n));
        }
      }
      if (!sweep_payloads.empty()) {
        spec.payload_sizes = parse_u64_list(sweep_payloads, "payload size");
      }
      if (!sweep_subs.empty()) {
        spec.subscriber_counts = parse_u64_list(sweep_subs, "subscriber count");
      }
      if (!sweep_intervals.empty()) {
        spec.intervals_us = parse_u64_list(sweep_intervals, "interval");
      }
      if (sweep_count) spec.messages = *sweep_count;
      if (sweep_delay) spec.delay_ms = *sweep_delay;
      if (sweep_reps) spec.repetitions = *sweep_reps;
      if (sweep_sampler) spec.sampler_interval_ms = *sweep_sampler;
      spec.cores = sweep_cores.empty() ? cores_from_env() : parse_core_list(sweep_cores);

      sweep_options opts;
      opts.force = sweep_force;
      opts.results_dir = sweep_out.empty()
                             ? std::filesystem::path("results") /
                                   std::filesystem::path(spec_file).stem()
                             : std::filesystem::path(sweep_out);
      const sweep_result result = run_sweep(spec, opts);
      int flagged = 0;
      for (const sweep_row& r : result.rows) flagged += (r.failed || r.partial) ? 1 : 0;
      if (json_mode) {
        out << nlohmann::json{{"schema", kSchemaVersion},
                              {"results_dir", opts.results_dir.string()},
                              {"rows", result.rows.size()},
                              {"flagged", flagged}}
                   .dump()
            << "\n";
      } else {
        out << "sweep complete: " << result.rows.size() << " configurations, " << flagged
            << " flagged; rows in " << (opts.results_dir / "rows.jsonl").string() << "\n";
      }
      return flagged > 0 ? kExitPartial : kExitOk;
    }

    if (app.got_subcommand(analyze_cmd) || app.got_subcommand(report_cmd)) {
      const bool analyzing = app.got_subcommand(analyze_cmd);
      const std::string dir = analyzing ? results_dir : report_dir;
      const auto interval = analyzing ? interval_filter : report_interval;
      const sweep_result result = load_sweep(dir);
      std::vector<std::string> wanted = metrics_req;
      const bool explicit_metrics = analyzing && !wanted.empty();
      if (wanted.empty()) wanted = {"latency", "throughput", "cpu"};
      std::vector<optimality_map> maps;
      for (const std::string& metric : wanted) {
        try {
          maps.push_back(optimality(result, metric, default_direction(metric), interval));
        } catch (const bench_error& e) {
          if (explicit_metrics) throw;
          err << "note: skipping optimality map for '" << metric << "': " << e.what() << "\n";
        }
      }
      if (analyzing) {
        nlohmann::json doc = nlohmann::json::array();
        for (const optimality_map& m : maps) doc.push_back(m);
        write_text_file((std::filesystem::path(dir) / "optimality.json").string(),
                        doc.dump(2) + "\n");
        for (const optimality_map& m : maps) {
          for (const auto& [tname, cells] : m.per_transport) {
            (void)cells;
            write_text_file(
                (std::filesystem::path(dir) / ("optimality_" + m.metric + "_" + tname + ".csv"))
                    .string(),
                report_detail::optimality_csv(m, tname));
          }
        }
        if (json_mode) {
          out << doc.dump() << "\n";
        } else {
          for (const optimality_map& m : maps) {
            for (const auto& [tname, cells] : m.per_transport) {
              out << "== " << m.metric << " / " << tname << " (T=" << m.interval_us << "us) ==\n";
              for (std::size_t pi = 0; pi < m.payload_sizes.size(); ++pi) {
                out << "  P=" << report_detail::format_bytes(m.payload_sizes[pi]) << ":";
                for (std::size_t si = 0; si < m.subscriber_counts.size(); ++si) {
                  const optimality_cell& c = cells[pi * m.subscriber_counts.size() + si];
                  out << "  S" << m.subscriber_counts[si] << "=" << c.winner
                      << (c.tie ? "*" : "");
                }
                out << "\n";
              }
            }
          }
        }
      } else {
        emit_reports(result, maps, dir);
        if (json_mode) {
          out << nlohmann::json{{"schema", kSchemaVersion},
                                {"results_dir", dir},
                                {"maps", maps.size()}}
                     .dump()
              << "\n";
        } else {
          out << "tables and figures written under " << dir << "\n";
        }
      }
      return kExitOk;
    }

    if (app.got_subcommand(list_cmd)) {
      backend_registry reg;
      add_adapters(reg, list_adapter_flags);
      nlohmann::json doc = nlohmann::json::array();
      auto add = [&doc](const backend_descriptor& d, const std::string& note) {
        std::vector<std::string> transports;
        for (transport t : d.supported_transports) transports.push_back(transport_name(t));
        std::string cmd;
        for (const std::string& part : d.adapter_command) cmd += (cmd.empty() ? "" : " ") + part;
        doc.push_back(nlohmann::json{{"name", d.name},
                                     {"kind", backend_kind_name(d.kind)},
                                     {"transports", transports},
                                     {"command", cmd},
                                     {"note", note}});
      };
      add(reg.resolve("refbus"), "bundled reference bus");
      add(reg.resolve("stub"), "synthetic deterministic backend");
      for (const auto& [name, cmd] : reg.adapters) {
        (void)cmd;
        add(reg.resolve(name), "registered adapter");
      }
      if (json_mode) {
        out << doc.dump() << "\n";
      } else {
        for (const auto& entry : doc) {
          out << entry["name"].get<std::string>() << "  [" << entry["kind"].get<std::string>()
              << "]  transports:";
          for (const auto& t : entry["transports"]) out << " " << t.get<std::string>();
          const std::string cmd = entry["command"].get<std::string>();
          if (!cmd.empty()) out << "  command: " << cmd;
          out << "  (" << entry["note"].get<std::string>() << ")\n";
        }
      }
      return kExitOk;
    }
  } catch (const bench_error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == errc::usage_error || e.code() == errc::unsupported_transport ||
        e.code() == errc::invalid_endpoint) {
      return kExitUsage;
    }
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace brokerbench::cli
