// Figures of merit computed from raw measurement data: latency summary
// statistics, packet delay variation ("jitter"), payload throughput, and
// the two-level subscriber/run averaging. All functions are pure.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brokerbench/common.hpp"

namespace brokerbench::metrics {

// One-way latencies in microseconds, in reception order. The order
// matters: jitter is defined over consecutive receptions.
using latency_series = std::vector<double>;

struct latency_stats {
  double min_us = 0;
  double avg_us = 0;
  double p90_us = 0;
  double p99_us = 0;
  double max_us = 0;

  friend bool operator==(const latency_stats&, const latency_stats&) = default;
};

namespace detail {

inline void check_series(std::span<const double> series) {
  for (double v : series) {
    if (!std::isfinite(v) || v < 0.0) {
      fail(errc::malformed_payload, "latency series contains a non-finite or negative value");
    }
  }
}

// Nearest-rank percentile: value at index ceil(percent/100 * M), 1-based,
// on the ascending sort. Integer arithmetic keeps the rank exact.
inline double nearest_rank(std::span<const double> sorted, unsigned percent) {
  const std::size_t m = sorted.size();
  const std::size_t rank = (m * percent + 99) / 100;
  return sorted[rank == 0 ? 0 : rank - 1];
}

}  // namespace detail

inline latency_stats summarize(std::span<const double> series_us) {
  if (series_us.empty()) fail(errc::empty_series, "cannot summarize an empty latency series");
  detail::check_series(series_us);
  std::vector<double> sorted(series_us.begin(), series_us.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (double v : sorted) sum += v;
  return latency_stats{
      .min_us = sorted.front(),
      .avg_us = sum / static_cast<double>(sorted.size()),
      .p90_us = detail::nearest_rank(sorted, 90),
      .p99_us = detail::nearest_rank(sorted, 99),
      .max_us = sorted.back(),
  };
}

// Mean absolute difference of consecutive latencies in reception order
// (one-way packet delay variation, RFC 3393 style).
inline double jitter(std::span<const double> series_us) {
  if (series_us.size() < 2) {
    fail(errc::insufficient_samples,
         "jitter needs at least two samples, got " + std::to_string(series_us.size()));
  }
  detail::check_series(series_us);
  double acc = 0;
  for (std::size_t i = 1; i < series_us.size(); ++i) {
    acc += std::abs(series_us[i] - series_us[i - 1]);
  }
  return acc / static_cast<double>(series_us.size() - 1);
}

struct throughput_input {
  std::uint64_t received = 0;       // M
  std::uint64_t payload_bytes = 0;  // P
  std::uint64_t first_send_ns = 0;  // wall clock, UNIX epoch
  std::uint64_t last_recv_ns = 0;   // wall clock, UNIX epoch
};

// Megabytes (10^6 bytes) delivered per second, over the span from the
// first message sent to the last message received.
inline double throughput_mb_per_s(const throughput_input& in) {
  if (in.received == 0) fail(errc::no_messages, "throughput undefined with zero messages");
  if (in.last_recv_ns <= in.first_send_ns) {
    fail(errc::zero_span, "last reception does not follow the first send");
  }
  const double span_s = static_cast<double>(in.last_recv_ns - in.first_send_ns) / 1e9;
  const double bytes = static_cast<double>(in.received) * static_cast<double>(in.payload_bytes);
  return bytes / span_s / 1e6;
}

// Metrics for one subscriber of one run, or (after averaging) for a run
// or a full configuration. jitter is absent when fewer than two messages
// arrived; cpu/mem medians are absent when resource sampling was off.
struct run_metrics {
  latency_stats latency{};
  double throughput_mb_s = 0;
  std::optional<double> jitter_us;
  double received = 0;
  double sent = 0;
  std::optional<double> cpu_median_pct;
  std::optional<double> mem_median_pct;

  friend bool operator==(const run_metrics&, const run_metrics&) = default;
};

namespace detail {

inline void accumulate_optional(std::optional<double>& acc, std::size_t& n,
                                const std::optional<double>& v) {
  if (!v) return;
  acc = acc.value_or(0.0) + *v;
  ++n;
}

inline std::optional<double> finish_optional(const std::optional<double>& acc, std::size_t n) {
  if (!acc) return std::nullopt;
  return *acc / static_cast<double>(n);
}

inline run_metrics field_mean(std::span<const run_metrics> items, const char* what) {
  if (items.empty()) fail(errc::empty_list, std::string("cannot average zero ") + what);
  run_metrics out{};
  std::optional<double> jit_acc, cpu_acc, mem_acc;
  std::size_t jit_n = 0, cpu_n = 0, mem_n = 0;
  for (const run_metrics& m : items) {
    out.latency.min_us += m.latency.min_us;
    out.latency.avg_us += m.latency.avg_us;
    out.latency.p90_us += m.latency.p90_us;
    out.latency.p99_us += m.latency.p99_us;
    out.latency.max_us += m.latency.max_us;
    out.throughput_mb_s += m.throughput_mb_s;
    out.received += m.received;
    out.sent += m.sent;
    accumulate_optional(jit_acc, jit_n, m.jitter_us);
    accumulate_optional(cpu_acc, cpu_n, m.cpu_median_pct);
    accumulate_optional(mem_acc, mem_n, m.mem_median_pct);
  }
  const double n = static_cast<double>(items.size());
  out.latency.min_us /= n;
  out.latency.avg_us /= n;
  out.latency.p90_us /= n;
  out.latency.p99_us /= n;
  out.latency.max_us /= n;
  out.throughput_mb_s /= n;
  out.received /= n;
  out.sent /= n;
  out.jitter_us = finish_optional(jit_acc, jit_n);
  out.cpu_median_pct = finish_optional(cpu_acc, cpu_n);
  out.mem_median_pct = finish_optional(mem_acc, mem_n);
  return out;
}

}  // namespace detail

// First level of the two-level averaging: subscriber results of one run
// become the result of that run. Per-subscriber latency distributions are
// never merged; percentiles were computed per subscriber already.
inline run_metrics average_subscribers(std::span<const run_metrics> per_subscriber) {
  return detail::field_mean(per_subscriber, "subscriber results");
}

// Second level: run results become the result for the configuration.
inline run_metrics average_runs(std::span<const run_metrics> per_run) {
  return detail::field_mean(per_run, "run results");
}

}  // namespace brokerbench::metrics
