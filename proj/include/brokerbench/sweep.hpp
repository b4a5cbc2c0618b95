// Cartesian parameter sweep over (backends x transports x intervals x
// payload sizes x subscriber counts), persistence with resume, and the
// optimality-region analysis over the resulting grid.
//
// Configurations run strictly sequentially: concurrent runs would
// contaminate each other's CPU and latency measurements.
#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "brokerbench/runner.hpp"

namespace brokerbench {

struct sweep_spec {
  std::vector<backend_descriptor> backends;
  std::vector<transport> transports;
  std::vector<std::uint64_t> intervals_us;
  std::vector<std::uint64_t> payload_sizes;
  std::vector<std::uint64_t> subscriber_counts;
  // Fixed per sweep.
  std::uint64_t messages = 5000;
  std::uint64_t delay_ms = 1000;
  std::uint64_t repetitions = 4;
  std::vector<int> cores;
  std::uint64_t receive_timeout_ms = 5000;
  std::uint64_t sampler_interval_ms = 100;
};

inline void validate(const sweep_spec& spec) {
  if (spec.backends.empty() || spec.transports.empty() || spec.intervals_us.empty() ||
      spec.payload_sizes.empty() || spec.subscriber_counts.empty()) {
    fail(errc::usage_error, "every sweep parameter set must be non-empty");
  }
  std::set<std::string> names;
  for (const backend_descriptor& b : spec.backends) {
    if (!names.insert(b.name).second) {
      fail(errc::usage_error, "duplicate backend name '" + b.name + "' in sweep");
    }
  }
}

inline std::string config_key(const config_snapshot& s) {
  return "backend=" + s.backend + ";transport=" + s.transport +
         ";P=" + std::to_string(s.payload_bytes) + ";S=" + std::to_string(s.subscribers) +
         ";T=" + std::to_string(s.interval_us);
}

// Lexicographic over the declared sets, outermost first: backends,
// transports, intervals, payload sizes, subscriber counts. The count is
// the product of the set sizes.
inline std::vector<experiment_config> enumerate(const sweep_spec& spec) {
  validate(spec);
  std::vector<experiment_config> configs;
  for (const backend_descriptor& backend : spec.backends) {
    for (transport t : spec.transports) {
      for (std::uint64_t interval : spec.intervals_us) {
        for (std::uint64_t payload : spec.payload_sizes) {
          for (std::uint64_t subs : spec.subscriber_counts) {
            experiment_config cfg;
            cfg.backend = backend;
            cfg.transport_kind = t;
            cfg.interval_us = interval;
            cfg.payload_size = payload;
            cfg.subscribers = subs;
            cfg.messages = spec.messages;
            cfg.delay_ms = spec.delay_ms;
            cfg.repetitions = spec.repetitions;
            cfg.cores = spec.cores;
            cfg.receive_timeout_ms = spec.receive_timeout_ms;
            cfg.sampler_interval_ms = spec.sampler_interval_ms;
            configs.push_back(std::move(cfg));
          }
        }
      }
    }
  }
  return configs;
}

struct sweep_row {
  std::string key;
  config_snapshot config;
  bool failed = false;
  bool partial = false;
  std::string failure;
  // Raw per-run material, as a path relative to the results directory;
  // never inlined into the row.
  std::string runs_dir;
  std::optional<metrics::run_metrics> result;
};

inline void to_json(nlohmann::json& j, const sweep_row& r) {
  j = nlohmann::json{{"schema", kSchemaVersion}, {"key", r.key},         {"config", r.config},
                     {"failed", r.failed},       {"partial", r.partial}, {"failure", r.failure},
                     {"runs_dir", r.runs_dir}};
  j["metrics"] = r.result ? nlohmann::json(*r.result) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, sweep_row& r) {
  j.at("key").get_to(r.key);
  j.at("config").get_to(r.config);
  j.at("failed").get_to(r.failed);
  r.partial = j.value("partial", false);
  r.failure = j.value("failure", "");
  r.runs_dir = j.value("runs_dir", "");
  if (j.contains("metrics") && !j.at("metrics").is_null()) {
    r.result = j.at("metrics").get<metrics::run_metrics>();
  } else {
    r.result.reset();
  }
}

struct sweep_metadata {
  std::string suite_version = kVersion;
  std::string host;
  std::string clock_source = "CLOCK_REALTIME stamps / CLOCK_MONOTONIC pacing";
  std::vector<std::string> backend_order;  // declared order, breaks ties
  std::uint64_t sampler_interval_ms = 0;
};

inline void to_json(nlohmann::json& j, const sweep_metadata& m) {
  j = nlohmann::json{{"schema", kSchemaVersion},
                     {"suite_version", m.suite_version},
                     {"host", m.host},
                     {"clock_source", m.clock_source},
                     {"backend_order", m.backend_order},
                     {"sampler_interval_ms", m.sampler_interval_ms}};
}

inline void from_json(const nlohmann::json& j, sweep_metadata& m) {
  m.suite_version = j.value("suite_version", "");
  m.host = j.value("host", "");
  m.clock_source = j.value("clock_source", "");
  j.at("backend_order").get_to(m.backend_order);
  m.sampler_interval_ms = j.value("sampler_interval_ms", std::uint64_t{0});
}

struct sweep_result {
  sweep_metadata meta;
  std::vector<sweep_row> rows;
};

namespace sweep_detail {

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

inline std::string host_name() {
  char buf[256] = {0};
  if (gethostname(buf, sizeof(buf) - 1) != 0) return "unknown";
  return buf;
}

inline std::map<std::string, sweep_row> load_rows(const std::filesystem::path& file) {
  std::map<std::string, sweep_row> rows;
  std::ifstream in(file);
  if (!in) return rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      sweep_row row = nlohmann::json::parse(line).get<sweep_row>();
      rows[row.key] = std::move(row);
    } catch (const nlohmann::json::exception&) {
      // A torn trailing line from an interrupted sweep; rerun it.
    }
  }
  return rows;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string rows_csv(const std::vector<sweep_row>& rows) {
  std::string out =
      "key,backend,transport,payload_bytes,subscribers,interval_us,messages,delay_ms,"
      "repetitions,failed,partial,lat_min_us,lat_avg_us,lat_p90_us,lat_p99_us,lat_max_us,"
      "throughput_mb_s,jitter_us,received,sent,cpu_median_pct,mem_median_pct,failure\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const sweep_row& r : rows) {
    out += csv_escape(r.key) + ',' + r.config.backend + ',' + r.config.transport + ',' +
           std::to_string(r.config.payload_bytes) + ',' + std::to_string(r.config.subscribers) +
           ',' + std::to_string(r.config.interval_us) + ',' + std::to_string(r.config.messages) +
           ',' + std::to_string(r.config.delay_ms) + ',' + std::to_string(r.config.repetitions) +
           ',' + (r.failed ? "1" : "0") + ',' + (r.partial ? "1" : "0") + ',';
    if (r.result) {
      const metrics::run_metrics& m = *r.result;
      out += format_number(m.latency.min_us) + ',' + format_number(m.latency.avg_us) + ',' +
             format_number(m.latency.p90_us) + ',' + format_number(m.latency.p99_us) + ',' +
             format_number(m.latency.max_us) + ',' + format_number(m.throughput_mb_s) + ',' +
             opt(m.jitter_us) + ',' + format_number(m.received) + ',' + format_number(m.sent) +
             ',' + opt(m.cpu_median_pct) + ',' + opt(m.mem_median_pct);
    } else {
      out += ",,,,,,,,,,";
    }
    out += ',' + csv_escape(r.failure) + '\n';
  }
  return out;
}

}  // namespace sweep_detail

struct sweep_options {
  std::filesystem::path results_dir;
  bool force = false;          // rerun rows that are already persisted
  bool archive_runs = true;    // keep raw per-run material under runs/
};

// Runs every configuration, persisting each row the moment it finishes
// (append + flush), so an interrupted sweep resumes where it stopped.
inline sweep_result run_sweep(const sweep_spec& spec, const sweep_options& options) {
  namespace fs = std::filesystem;
  if (options.results_dir.empty()) fail(errc::usage_error, "sweep needs a results directory");
  fs::create_directories(options.results_dir);
  const fs::path rows_file = options.results_dir / "rows.jsonl";
  const fs::path meta_file = options.results_dir / "meta.json";

  sweep_result result;
  result.meta.host = sweep_detail::host_name();
  result.meta.sampler_interval_ms = spec.sampler_interval_ms;
  for (const backend_descriptor& b : spec.backends) result.meta.backend_order.push_back(b.name);
  if (!fs::exists(meta_file)) {
    write_text_file(meta_file.string(), nlohmann::json(result.meta).dump(2) + "\n");
  } else {
    try {
      result.meta = nlohmann::json::parse(std::ifstream(meta_file)).get<sweep_metadata>();
    } catch (const nlohmann::json::exception& e) {
      fail(errc::io_error, "unreadable meta.json in results directory: " + std::string(e.what()));
    }
  }

  std::map<std::string, sweep_row> done =
      options.force ? std::map<std::string, sweep_row>{} : sweep_detail::load_rows(rows_file);
  if (options.force) fs::remove(rows_file);

  std::ofstream rows_out(rows_file, std::ios::app);
  if (!rows_out) fail(errc::io_error, "cannot open " + rows_file.string());

  const std::vector<experiment_config> configs = enumerate(spec);
  for (const experiment_config& cfg : configs) {
    sweep_row row;
    row.config = snapshot_of(cfg);
    row.key = config_key(row.config);
    if (auto it = done.find(row.key); it != done.end()) {
      result.rows.push_back(it->second);
      continue;
    }
    execute_options exec_opts;
    if (options.archive_runs) {
      row.runs_dir = "runs/" + sweep_detail::fnv1a_hex(row.key);
      exec_opts.archive_dir = options.results_dir / row.runs_dir;
    }
    try {
      const execute_result run = execute(cfg, exec_opts);
      row.result = run.averaged;
      row.partial = run.partial;
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure = e.what();
    }
    rows_out << nlohmann::json(row).dump() << '\n';
    rows_out.flush();
    result.rows.push_back(std::move(row));
  }

  write_text_file((options.results_dir / "rows.csv").string(),
                  sweep_detail::rows_csv(result.rows));
  return result;
}

inline sweep_result load_sweep(const std::filesystem::path& results_dir) {
  namespace fs = std::filesystem;
  sweep_result result;
  const fs::path meta_file = results_dir / "meta.json";
  const fs::path rows_file = results_dir / "rows.jsonl";
  if (!fs::exists(rows_file)) {
    fail(errc::usage_error, "no rows.jsonl under " + results_dir.string());
  }
  if (fs::exists(meta_file)) {
    try {
      result.meta = nlohmann::json::parse(std::ifstream(meta_file)).get<sweep_metadata>();
    } catch (const nlohmann::json::exception& e) {
      fail(errc::io_error, "unreadable meta.json: " + std::string(e.what()));
    }
  }
  std::ifstream in(rows_file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      result.rows.push_back(nlohmann::json::parse(line).get<sweep_row>());
    } catch (const nlohmann::json::exception& e) {
      fail(errc::io_error, "unreadable row in rows.jsonl: " + std::string(e.what()));
    }
  }
  if (result.meta.backend_order.empty()) {
    for (const sweep_row& r : result.rows) {
      if (std::find(result.meta.backend_order.begin(), result.meta.backend_order.end(),
                    r.config.backend) == result.meta.backend_order.end()) {
        result.meta.backend_order.push_back(r.config.backend);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Optimality regions.

enum class opt_direction { minimize, maximize };

inline opt_direction default_direction(const std::string& metric) {
  return metric == "throughput" ? opt_direction::maximize : opt_direction::minimize;
}

// Named metric of an averaged row; absent when it was not measured.
inline std::optional<double> metric_value(const metrics::run_metrics& m,
                                          const std::string& metric) {
  if (metric == "latency" || metric == "latency_avg") return m.latency.avg_us;
  if (metric == "latency_min") return m.latency.min_us;
  if (metric == "latency_p90") return m.latency.p90_us;
  if (metric == "latency_p99") return m.latency.p99_us;
  if (metric == "latency_max") return m.latency.max_us;
  if (metric == "throughput") return m.throughput_mb_s;
  if (metric == "jitter") return m.jitter_us;
  if (metric == "cpu") return m.cpu_median_pct;
  if (metric == "memory") return m.mem_median_pct;
  fail(errc::usage_error, "unknown metric '" + metric + "'");
}

struct optimality_cell {
  std::string winner;
  double best_value = 0;
  bool tie = false;
};

struct optimality_map {
  std::string metric;
  opt_direction direction = opt_direction::minimize;
  std::uint64_t interval_us = 0;
  std::vector<std::uint64_t> payload_sizes;      // ascending
  std::vector<std::uint64_t> subscriber_counts;  // ascending
  std::vector<std::string> backends;             // declared order
  // transport name -> row-major cells [payload][subscriber]
  std::map<std::string, std::vector<optimality_cell>> per_transport;
};

inline void to_json(nlohmann::json& j, const optimality_cell& c) {
  j = nlohmann::json{{"winner", c.winner}, {"best_value", c.best_value}, {"tie", c.tie}};
}

inline void to_json(nlohmann::json& j, const optimality_map& m) {
  j = nlohmann::json{{"schema", kSchemaVersion},
                     {"metric", m.metric},
                     {"direction", m.direction == opt_direction::maximize ? "max" : "min"},
                     {"interval_us", m.interval_us},
                     {"payload_sizes", m.payload_sizes},
                     {"subscriber_counts", m.subscriber_counts},
                     {"backends", m.backends},
                     {"per_transport", m.per_transport}};
}

// Per (payload, subscribers) cell and transport, the backend with the
// best averaged value of the metric. Every benchmarked backend must
// cover every cell. Ties go to the first backend in declared order and
// are flagged.
inline optimality_map optimality(const sweep_result& result, const std::string& metric,
                                 opt_direction direction,
                                 std::optional<std::uint64_t> interval_filter = std::nullopt) {
  optimality_map map;
  map.metric = metric;
  map.direction = direction;
  map.backends = result.meta.backend_order;

  std::set<std::uint64_t> payloads, subs, intervals;
  std::set<std::string> transports;
  for (const sweep_row& r : result.rows) {
    if (interval_filter && r.config.interval_us != *interval_filter) continue;
    payloads.insert(r.config.payload_bytes);
    subs.insert(r.config.subscribers);
    intervals.insert(r.config.interval_us);
    transports.insert(r.config.transport);
  }
  if (payloads.empty()) fail(errc::incomplete_grid, "no rows match the requested interval");
  if (intervals.size() > 1) {
    fail(errc::usage_error,
         "rows span several publishing intervals; pass an explicit interval to analyze");
  }
  map.interval_us = *intervals.begin();
  map.payload_sizes.assign(payloads.begin(), payloads.end());
  map.subscriber_counts.assign(subs.begin(), subs.end());

  std::map<std::string, const sweep_row*> by_key;
  for (const sweep_row& r : result.rows) by_key[r.key] = &r;

  for (const std::string& t : transports) {
    std::vector<optimality_cell> cells;
    for (std::uint64_t p : map.payload_sizes) {
      for (std::uint64_t s : map.subscriber_counts) {
        optimality_cell cell;
        bool first = true;
        for (const std::string& backend : map.backends) {
          config_snapshot probe;
          probe.backend = backend;
          probe.transport = t;
          probe.payload_bytes = p;
          probe.subscribers = s;
          probe.interval_us = map.interval_us;
          const auto it = by_key.find(config_key(probe));
          if (it == by_key.end() || it->second->failed || !it->second->result) {
            fail(errc::incomplete_grid, "missing or failed row for " + config_key(probe));
          }
          const auto value = metric_value(*it->second->result, metric);
          if (!value) {
            fail(errc::incomplete_grid, "metric '" + metric + "' absent for " + config_key(probe));
          }
          if (first) {
            cell.winner = backend;
            cell.best_value = *value;
            first = false;
            continue;
          }
          if (*value == cell.best_value) {
            cell.tie = true;
          } else if ((direction == opt_direction::minimize && *value < cell.best_value) ||
                     (direction == opt_direction::maximize && *value > cell.best_value)) {
            cell.winner = backend;
            cell.best_value = *value;
            cell.tie = false;
          }
        }
        cells.push_back(std::move(cell));
      }
    }
    map.per_transport[t] = std::move(cells);
  }
  return map;
}

}  // namespace brokerbench
