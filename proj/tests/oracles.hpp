// Brute-force reference implementations used to check the library. They
// deliberately share no code with the implementation paths they verify.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Nearest-rank percentile: value at index ceil(q*M), 1-based, ascending.
inline double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

struct latency_summary {
  double min, avg, p90, p99, max;
};

inline latency_summary summarize(const std::vector<double>& series) {
  latency_summary s{};
  s.min = *std::min_element(series.begin(), series.end());
  s.max = *std::max_element(series.begin(), series.end());
  s.avg = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  s.p90 = percentile(series, 0.90);
  s.p99 = percentile(series, 0.99);
  return s;
}

inline double jitter(const std::vector<double>& series) {
  double acc = 0;
  for (std::size_t i = 1; i < series.size(); ++i) acc += std::fabs(series[i] - series[i - 1]);
  return acc / static_cast<double>(series.size() - 1);
}

inline double throughput_mb_s(std::uint64_t received, std::uint64_t payload_bytes,
                              std::uint64_t first_send_ns, std::uint64_t last_recv_ns) {
  const double span_s = static_cast<double>(last_recv_ns - first_send_ns) / 1e9;
  return static_cast<double>(received) * static_cast<double>(payload_bytes) / span_s / 1e6;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// The paper's order: sum across processes at each tick, then median.
inline double sum_then_median(const std::vector<std::vector<double>>& per_tick_values) {
  std::vector<double> sums;
  for (const auto& tick : per_tick_values) {
    sums.push_back(std::accumulate(tick.begin(), tick.end(), 0.0));
  }
  return median(std::move(sums));
}

inline std::size_t product_count(const std::vector<std::size_t>& set_sizes) {
  std::size_t total = 1;
  for (std::size_t s : set_sizes) total *= s;
  return total;
}

// First best index plus a tie flag, by exhaustive comparison.
inline std::pair<std::size_t, bool> argbest(const std::vector<double>& values, bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (maximize ? values[i] > values[best] : values[i] < values[best]) best = i;
  }
  bool tie = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != best && values[i] == values[best]) tie = true;
  }
  return {best, tie};
}

inline bool close_rel(double a, double b, double tol = 1e-9) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

}  // namespace oracle
