// Periodic per-process CPU and unique-memory sampling during a run.
// CPU is percent of one core, so the per-tick aggregate can exceed 100%
// with several busy processes. Memory is the Unique Set Size as a share
// of physical memory; on kernels without smaps the sampler degrades to
// the resident set and flags the timeline.
//
// Aggregation order is fixed: sum across processes at each tick first,
// then take the median over ticks.
#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "brokerbench/clock.hpp"
#include "brokerbench/common.hpp"

namespace brokerbench {

struct resource_sample {
  double cpu_percent = 0;  // of one core
  std::uint64_t uss_bytes = 0;
  double uss_percent = 0;  // of physical memory
};

struct resource_timeline {
  std::vector<std::uint64_t> sample_times_ns;  // monotonic
  // Every series is aligned to sample_times_ns; a process that exited
  // mid-run yields absent entries, never zeros.
  std::map<int, std::vector<std::optional<resource_sample>>> per_process;
  std::uint64_t interval_ms = 0;
  bool uss_degraded = false;  // resident set reported instead of USS
};

namespace sampler_detail {

inline std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// utime + stime in clock ticks, from /proc/<pid>/stat. The comm field
// may contain spaces, so parsing starts after the last ')'.
inline std::optional<std::uint64_t> cpu_ticks(int pid) {
  const auto content = slurp("/proc/" + std::to_string(pid) + "/stat");
  if (!content) return std::nullopt;
  const auto close_paren = content->rfind(')');
  if (close_paren == std::string::npos) return std::nullopt;
  std::istringstream fields(content->substr(close_paren + 1));
  std::string tok;
  std::uint64_t utime = 0, stime = 0;
  // Fields after comm: state(3) ... utime is field 14, stime 15.
  for (int idx = 3; idx <= 15 && (fields >> tok); ++idx) {
    if (idx == 14) utime = std::stoull(tok);
    if (idx == 15) {
      stime = std::stoull(tok);
      return utime + stime;
    }
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> sum_kb_fields(const std::string& content,
                                                  std::initializer_list<const char*> keys) {
  std::uint64_t total = 0;
  bool any = false;
  std::istringstream lines(content);
  std::string line;
  while (std::getline(lines, line)) {
    for (const char* key : keys) {
      if (line.rfind(key, 0) == 0) {
        std::istringstream ls(line.substr(std::string(key).size()));
        std::uint64_t kb = 0;
        if (ls >> kb) {
          total += kb;
          any = true;
        }
      }
    }
  }
  if (!any) return std::nullopt;
  return total * 1024;
}

// USS = private clean + private dirty. smaps_rollup is the cheap path,
// full smaps the fallback, VmRSS the degraded last resort.
inline std::optional<std::uint64_t> unique_set_size(int pid, bool& degraded) {
  const std::string base = "/proc/" + std::to_string(pid);
  if (auto rollup = slurp(base + "/smaps_rollup")) {
    if (auto v = sum_kb_fields(*rollup, {"Private_Clean:", "Private_Dirty:"})) return v;
  }
  if (auto smaps = slurp(base + "/smaps")) {
    if (auto v = sum_kb_fields(*smaps, {"Private_Clean:", "Private_Dirty:"})) return v;
  }
  if (auto status = slurp(base + "/status")) {
    if (auto v = sum_kb_fields(*status, {"VmRSS:"})) {
      degraded = true;
      return v;
    }
  }
  return std::nullopt;
}

inline std::uint64_t total_physical_memory() {
  if (auto meminfo = slurp("/proc/meminfo")) {
    if (auto v = sum_kb_fields(*meminfo, {"MemTotal:"})) return *v;
  }
  fail(errc::sampling_unsupported, "cannot read total physical memory from /proc/meminfo");
}

// A zombie still has a /proc entry (with zeroed memory fields) until it
// is reaped; for sampling purposes it has exited.
inline bool process_defunct(int pid) {
  const auto content = slurp("/proc/" + std::to_string(pid) + "/stat");
  if (!content) return true;
  const auto close_paren = content->rfind(')');
  if (close_paren == std::string::npos) return true;
  for (std::size_t i = close_paren + 1; i < content->size(); ++i) {
    const char c = (*content)[i];
    if (c == ' ') continue;
    return c == 'Z' || c == 'X';
  }
  return true;
}

inline bool process_alive(int pid) {
  return ::access(("/proc/" + std::to_string(pid)).c_str(), F_OK) == 0 && !process_defunct(pid);
}

}  // namespace sampler_detail

// Samples the given processes every `interval` until `stop` becomes
// true. CPU for tick k covers the interval since tick k-1 (the baseline
// is read at start).
inline resource_timeline sample_loop(const std::vector<int>& pids,
                                     std::chrono::milliseconds interval,
                                     const std::atomic<bool>& stop) {
  if (interval.count() <= 0) fail(errc::usage_error, "sampling interval must be positive");
  resource_timeline timeline;
  timeline.interval_ms = static_cast<std::uint64_t>(interval.count());
  const double total_mem = static_cast<double>(sampler_detail::total_physical_memory());
  const double ticks_per_second = static_cast<double>(sysconf(_SC_CLK_TCK));

  struct baseline {
    std::optional<std::uint64_t> ticks;
    std::uint64_t at_ns = 0;
  };
  std::map<int, baseline> baselines;
  for (int pid : pids) {
    if (!sampler_detail::process_alive(pid)) {
      fail(errc::no_such_process, "pid " + std::to_string(pid) + " not alive at sampler start");
    }
    baselines[pid] = {sampler_detail::cpu_ticks(pid), mono_clock_ns()};
    timeline.per_process[pid] = {};
  }

  const std::uint64_t interval_ns = static_cast<std::uint64_t>(interval.count()) * 1'000'000;
  std::uint64_t next_tick = mono_clock_ns() + interval_ns;
  while (!stop.load(std::memory_order_relaxed)) {
    const std::uint64_t now = mono_clock_ns();
    if (now < next_tick) {
      const std::uint64_t nap = std::min<std::uint64_t>(next_tick - now, 5'000'000);
      std::this_thread::sleep_for(std::chrono::nanoseconds(nap));
      continue;
    }
    const std::uint64_t tick_ns = now;
    timeline.sample_times_ns.push_back(tick_ns);
    for (int pid : pids) {
      auto& series = timeline.per_process[pid];
      auto& base = baselines[pid];
      if (sampler_detail::process_defunct(pid)) {
        series.push_back(std::nullopt);
        base.ticks.reset();
        continue;
      }
      const auto ticks = sampler_detail::cpu_ticks(pid);
      bool degraded = false;
      const auto uss = sampler_detail::unique_set_size(pid, degraded);
      if (!ticks || !uss || !base.ticks) {
        series.push_back(std::nullopt);  // exited mid-run: absent, not zero
        base.ticks = ticks;
        base.at_ns = tick_ns;
        continue;
      }
      const double elapsed_s = static_cast<double>(tick_ns - base.at_ns) / 1e9;
      const double used_s = static_cast<double>(*ticks - *base.ticks) / ticks_per_second;
      resource_sample sample;
      sample.cpu_percent = elapsed_s > 0 ? used_s / elapsed_s * 100.0 : 0.0;
      sample.uss_bytes = *uss;
      sample.uss_percent = static_cast<double>(*uss) / total_mem * 100.0;
      series.push_back(sample);
      if (degraded) timeline.uss_degraded = true;
      base.ticks = ticks;
      base.at_ns = tick_ns;
    }
    next_tick += interval_ns;
  }
  return timeline;
}

struct usage_medians {
  double cpu_median_pct = 0;
  double mem_median_pct = 0;
};

// Sum over present processes at each tick, then the median over ticks
// (even count: mean of the two middle values). Ticks where every
// process is absent are skipped.
inline usage_medians aggregate(const resource_timeline& timeline) {
  std::vector<double> cpu_sums;
  std::vector<double> mem_sums;
  for (std::size_t tick = 0; tick < timeline.sample_times_ns.size(); ++tick) {
    double cpu = 0, mem = 0;
    bool any = false;
    for (const auto& [pid, series] : timeline.per_process) {
      if (tick < series.size() && series[tick]) {
        cpu += series[tick]->cpu_percent;
        mem += series[tick]->uss_percent;
        any = true;
      }
    }
    if (any) {
      cpu_sums.push_back(cpu);
      mem_sums.push_back(mem);
    }
  }
  if (cpu_sums.empty()) fail(errc::empty_timeline, "no complete sample rows to aggregate");
  auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  return {median(cpu_sums), median(mem_sums)};
}

// Runs sample_loop on its own thread. The sampler deliberately stays
// unpinned so it does not compete for the isolated benchmark cores.
class resource_sampler {
public:
  void start(std::vector<int> pids, std::chrono::milliseconds interval) {
    stop_.store(false);
    thread_ = std::thread([this, pids = std::move(pids), interval] {
      try {
        timeline_ = sample_loop(pids, interval, stop_);
      } catch (const bench_error&) {
        failed_ = true;
      }
    });
  }

  resource_timeline stop() {
    stop_.store(true);
    if (thread_.joinable()) thread_.join();
    return std::move(timeline_);
  }

  bool failed() const { return failed_; }

private:
  std::thread thread_;
  std::atomic<bool> stop_{false};
  resource_timeline timeline_;
  bool failed_ = false;
};

}  // namespace brokerbench
