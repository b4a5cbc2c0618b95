// Minimal subprocess plumbing for adapter shims: spawn with stdout
// piped, drain several children concurrently (their reports can exceed
// the pipe buffer), wait with a deadline, kill stragglers.
#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "brokerbench/clock.hpp"
#include "brokerbench/common.hpp"

namespace brokerbench {

class child_process {
public:
  child_process() = default;
  child_process(const child_process&) = delete;
  child_process& operator=(const child_process&) = delete;

  child_process(child_process&& other) noexcept { *this = std::move(other); }
  child_process& operator=(child_process&& other) noexcept {
    if (this != &other) {
      cleanup();
      pid_ = other.pid_;
      stdout_fd_ = other.stdout_fd_;
      output_ = std::move(other.output_);
      eof_ = other.eof_;
      other.pid_ = -1;
      other.stdout_fd_ = -1;
    }
    return *this;
  }

  ~child_process() { cleanup(); }

  static child_process spawn(const std::vector<std::string>& argv) {
    if (argv.empty()) fail(errc::usage_error, "cannot spawn an empty command");
    int pipe_fds[2];
    if (::pipe(pipe_fds) != 0) fail(errc::io_error, "pipe: " + std::string(std::strerror(errno)));
    const pid_t pid = ::fork();
    if (pid < 0) {
      ::close(pipe_fds[0]);
      ::close(pipe_fds[1]);
      fail(errc::io_error, "fork: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
      // Child: stdout -> pipe, then exec. Only async-signal-safe calls.
      ::dup2(pipe_fds[1], STDOUT_FILENO);
      ::close(pipe_fds[0]);
      ::close(pipe_fds[1]);
      std::vector<char*> cargv;
      cargv.reserve(argv.size() + 1);
      for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
      cargv.push_back(nullptr);
      ::execvp(cargv[0], cargv.data());
      ::_exit(127);
    }
    ::close(pipe_fds[1]);
    child_process child;
    child.pid_ = pid;
    child.stdout_fd_ = pipe_fds[0];
    const int flags = ::fcntl(child.stdout_fd_, F_GETFL, 0);
    ::fcntl(child.stdout_fd_, F_SETFL, flags | O_NONBLOCK);
    return child;
  }

  int pid() const { return pid_; }
  int stdout_fd() const { return stdout_fd_; }
  bool output_complete() const { return eof_; }
  const std::string& output() const { return output_; }

  // Non-blocking read of whatever is available; returns false on EOF.
  bool pump() {
    if (eof_ || stdout_fd_ < 0) return false;
    char buf[16 * 1024];
    for (;;) {
      const ssize_t n = ::read(stdout_fd_, buf, sizeof(buf));
      if (n > 0) {
        output_.append(buf, static_cast<std::size_t>(n));
        continue;
      }
      if (n == 0) {
        eof_ = true;
        ::close(stdout_fd_);
        stdout_fd_ = -1;
        return false;
      }
      if (errno == EINTR) continue;
      return true;  // EAGAIN: drained for now
    }
  }

  // Waits up to the deadline, then SIGKILLs. Returns the exit code, or
  // -1 when the child was signaled or had to be killed.
  int wait(std::chrono::milliseconds deadline) {
    if (pid_ < 0) return -1;
    const std::uint64_t limit =
        mono_clock_ns() + static_cast<std::uint64_t>(deadline.count()) * 1'000'000;
    int status = 0;
    for (;;) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) break;
      if (r < 0 && errno != EINTR) {
        pid_ = -1;
        return -1;
      }
      if (mono_clock_ns() >= limit) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        return -1;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    pid_ = -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
  }

  void kill_hard() {
    if (pid_ >= 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

private:
  void cleanup() {
    kill_hard();
    if (stdout_fd_ >= 0) {
      ::close(stdout_fd_);
      stdout_fd_ = -1;
    }
  }

  pid_t pid_ = -1;
  int stdout_fd_ = -1;
  std::string output_;
  bool eof_ = false;
};

// Reads every child's stdout until all pipes hit EOF or the deadline
// passes. Children block on a full pipe, so this must run while they
// are still working. Returns true when all outputs completed.
inline bool drain_children(std::span<child_process*> children, std::chrono::milliseconds deadline) {
  const std::uint64_t limit =
      mono_clock_ns() + static_cast<std::uint64_t>(deadline.count()) * 1'000'000;
  for (;;) {
    std::vector<pollfd> fds;
    std::vector<child_process*> open;
    for (child_process* c : children) {
      if (!c->output_complete() && c->stdout_fd() >= 0) {
        fds.push_back({c->stdout_fd(), POLLIN, 0});
        open.push_back(c);
      }
    }
    if (open.empty()) return true;
    const std::uint64_t now = mono_clock_ns();
    if (now >= limit) return false;
    const int wait_ms = static_cast<int>(std::min<std::uint64_t>((limit - now) / 1'000'000, 500));
    const int pr = ::poll(fds.data(), fds.size(), wait_ms < 1 ? 1 : wait_ms);
    if (pr < 0 && errno != EINTR) return false;
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].revents != 0) open[i]->pump();
    }
  }
}

}  // namespace brokerbench
