// Core pinning for publisher/subscriber execution units. Layout used by
// the runner: publisher on the first listed core, subscriber i on the
// next ones; the sampler stays unpinned.
#pragma once

#include <pthread.h>
#include <sched.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "brokerbench/common.hpp"

namespace brokerbench {

inline bool pin_current_thread(int core) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
}

inline bool pin_process(int pid, int core) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  return sched_setaffinity(pid, sizeof(set), &set) == 0;
}

inline std::vector<int> parse_core_list(const std::string& text) {
  std::vector<int> cores;
  std::string token;
  for (char c : text + ",") {
    if (c == ',' || c == ' ') {
      if (!token.empty()) {
        try {
          cores.push_back(std::stoi(token));
        } catch (const std::exception&) {
          fail(errc::usage_error, "bad core id '" + token + "' in core list");
        }
        token.clear();
      }
    } else {
      token += c;
    }
  }
  return cores;
}

// BROKERBENCH_CORES="2,3,4" — empty result means pinning stays off.
inline std::vector<int> cores_from_env() {
  const char* env = std::getenv("BROKERBENCH_CORES");
  if (env == nullptr || *env == '\0') return {};
  return parse_core_list(env);
}

}  // namespace brokerbench
