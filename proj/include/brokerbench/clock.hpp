// Clock access and pacing. Two clocks are used deliberately: the wall
// clock (UNIX epoch) for timestamps that cross process boundaries inside
// payloads and reports, the monotonic clock for spans and pacing.
#pragma once

#include <ctime>
#include <cstdint>
#include <chrono>
#include <thread>

namespace brokerbench {

inline std::uint64_t wall_clock_ns() {
  timespec ts{};
  clock_gettime(CLOCK_REALTIME, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1'000'000'000ull +
         static_cast<std::uint64_t>(ts.tv_nsec);
}

inline std::uint64_t mono_clock_ns() {
  timespec ts{};
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1'000'000'000ull +
         static_cast<std::uint64_t>(ts.tv_nsec);
}

// Window before a deadline in which pace_until_mono stops sleeping and
// spins. Plain sleep overshoots by scheduler granularity, which at a
// 1000 us publishing interval would dominate the schedule.
inline constexpr std::uint64_t kSpinWindowNs = 50'000;

inline void pace_until_mono(std::uint64_t deadline_ns) {
  for (;;) {
    const std::uint64_t now = mono_clock_ns();
    if (now >= deadline_ns) return;
    const std::uint64_t remaining = deadline_ns - now;
    if (remaining <= kSpinWindowNs) break;
    std::this_thread::sleep_for(std::chrono::nanoseconds(remaining - kSpinWindowNs));
  }
  while (mono_clock_ns() < deadline_ns) {
  }
}

inline void sleep_ms(std::uint64_t ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

}  // namespace brokerbench
