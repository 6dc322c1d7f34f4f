// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace moma {

/// 0 restores the default (MOMA_THREADS, else hardware concurrency).
void set_thread_count(int threads);
int thread_count();

/// Runs fn(row_begin, row_end) over disjoint row ranges. Every row is
/// processed by exactly one call, so per-pixel kernels stay deterministic.
void parallel_rows(int rows, const std::function<void(int, int)>& fn);

}  // namespace moma
