// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace moma {

namespace {

std::atomic<int> g_threads{0};

int default_threads() {
  if (const char* env = std::getenv("MOMA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(0, threads)); }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : default_threads();
}

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
  const int workers = std::min(thread_count(), rows);
  if (workers <= 1) {
    if (rows > 0) fn(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const int chunk = (rows + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(rows, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(fn, begin, end);
  }
  fn(0, std::min(rows, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace moma
