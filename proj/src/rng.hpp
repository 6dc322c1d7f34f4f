// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace moma::detail {

// std::uniform_int_distribution is implementation-defined; this one is not,
// so seeded draws agree across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

}  // namespace moma::detail
