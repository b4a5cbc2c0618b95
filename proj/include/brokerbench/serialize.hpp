// JSON bindings and CSV writers for the persisted result schema.
#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "brokerbench/common.hpp"
#include "brokerbench/metrics.hpp"
#include "brokerbench/sampler.hpp"

namespace brokerbench::metrics {

inline void to_json(nlohmann::json& j, const latency_stats& s) {
  j = nlohmann::json{{"min_us", s.min_us},
                     {"avg_us", s.avg_us},
                     {"p90_us", s.p90_us},
                     {"p99_us", s.p99_us},
                     {"max_us", s.max_us}};
}

inline void from_json(const nlohmann::json& j, latency_stats& s) {
  j.at("min_us").get_to(s.min_us);
  j.at("avg_us").get_to(s.avg_us);
  j.at("p90_us").get_to(s.p90_us);
  j.at("p99_us").get_to(s.p99_us);
  j.at("max_us").get_to(s.max_us);
}

inline void to_json(nlohmann::json& j, const run_metrics& m) {
  j = nlohmann::json{{"latency", m.latency},
                     {"throughput_mb_s", m.throughput_mb_s},
                     {"received", m.received},
                     {"sent", m.sent},
                     {"loss", m.sent - m.received}};
  j["jitter_us"] = m.jitter_us ? nlohmann::json(*m.jitter_us) : nlohmann::json(nullptr);
  j["cpu_median_pct"] =
      m.cpu_median_pct ? nlohmann::json(*m.cpu_median_pct) : nlohmann::json(nullptr);
  j["mem_median_pct"] =
      m.mem_median_pct ? nlohmann::json(*m.mem_median_pct) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, run_metrics& m) {
  j.at("latency").get_to(m.latency);
  j.at("throughput_mb_s").get_to(m.throughput_mb_s);
  j.at("received").get_to(m.received);
  j.at("sent").get_to(m.sent);
  auto opt = [&j](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  m.jitter_us = opt("jitter_us");
  m.cpu_median_pct = opt("cpu_median_pct");
  m.mem_median_pct = opt("mem_median_pct");
}

}  // namespace brokerbench::metrics

namespace brokerbench {

// Fixed-precision float formatting keeps emitted files byte-stable for
// identical inputs.
inline std::string format_number(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(errc::io_error, "cannot write " + path);
  out << content;
  if (!out.flush()) fail(errc::io_error, "short write to " + path);
}

inline std::string timeline_csv(const resource_timeline& timeline) {
  std::ostringstream out;
  out << "tick_mono_ns,pid,cpu_pct,uss_bytes,uss_pct\n";
  for (std::size_t tick = 0; tick < timeline.sample_times_ns.size(); ++tick) {
    for (const auto& [pid, series] : timeline.per_process) {
      if (tick >= series.size() || !series[tick]) continue;
      const resource_sample& s = *series[tick];
      out << timeline.sample_times_ns[tick] << ',' << pid << ',' << format_number(s.cpu_percent)
          << ',' << s.uss_bytes << ',' << format_number(s.uss_percent) << '\n';
    }
  }
  return out.str();
}

inline std::string latency_series_csv(const std::vector<double>& latencies_us) {
  std::ostringstream out;
  out << "latency_us\n";
  for (double v : latencies_us) out << format_number(v) << '\n';
  return out.str();
}

}  // namespace brokerbench
