#pragma once

namespace ipsr::parallel {

/// Caps worker threads. Reads IPSR_THREADS on first use when never set explicitly.
void set_thread_count(int threads);
int thread_count();

/// Scoped override used by deterministic runs.
class ThreadLimit {
 public:
  explicit ThreadLimit(int threads);
  ~ThreadLimit();
  ThreadLimit(const ThreadLimit&) = delete;
  ThreadLimit& operator=(const ThreadLimit&) = delete;

 private:
  int previous_;
};

}  // namespace ipsr::parallel
