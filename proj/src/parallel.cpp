#include "ipsr/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <mutex>

namespace ipsr::parallel {

namespace {

std::once_flag env_once;

void apply_env() {
  if (const char* env = std::getenv("IPSR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(std::min(n, omp_get_num_procs()));
  }
}

}  // namespace

void set_thread_count(int threads) {
  std::call_once(env_once, apply_env);
  omp_set_num_threads(std::max(1, threads));
}

int thread_count() {
  std::call_once(env_once, apply_env);
  return omp_get_max_threads();
}

ThreadLimit::ThreadLimit(int threads) : previous_(thread_count()) { set_thread_count(threads); }

ThreadLimit::~ThreadLimit() { omp_set_num_threads(previous_); }

}  // namespace ipsr::parallel
