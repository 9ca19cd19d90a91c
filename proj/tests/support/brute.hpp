#pragma once

// Test-side exhaustive oracles. Deliberately independent of the library's algorithms.

#include <cstdint>
#include <functional>
#include <vector>

#include "sublis/core.hpp"

namespace brute {

using sublis::Interval;
using sublis::Value;

// Exhaustive search over one-or-none slot choices per block.
inline std::size_t block_lis(const sublis::BlockSequence& y, std::size_t xlo, std::size_t xhi, const Interval& Y) {
  std::size_t best = 0;
  std::function<void(std::size_t, bool, Value, std::size_t)> go = [&](std::size_t i, bool have, Value last,
                                                                      std::size_t len) {
    best = std::max(best, len);
    if (i > xhi || i >= y.blocks()) return;
    go(i + 1, have, last, len);
    for (std::size_t j = 0; j < y.width(); ++j) {
      const Value v = y.at(i, j);
      if (v == sublis::kNull || !Y.contains(v)) continue;
      if (have && v <= last) continue;
      go(i + 1, true, v, len + 1);
    }
  };
  go(xlo, false, 0, 0);
  return best;
}

// Subset enumeration; n <= 20.
inline std::size_t lis(const std::vector<Value>& s) {
  std::size_t best = 0;
  const std::size_t n = s.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    bool have = false;
    Value last = 0;
    std::size_t len = 0;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      if (have && s[i] <= last) ok = false;
      have = true;
      last = s[i];
      ++len;
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

// Longest chain of intervals under a < b (max a < min b), one per block, blocks increasing.
// items: (block, interval); exhaustive DFS.
inline std::size_t interval_chain(const std::vector<std::pair<std::size_t, Interval>>& items) {
  std::size_t best = 0;
  std::function<void(std::size_t, int, std::size_t)> go = [&](std::size_t i, int last, std::size_t len) {
    best = std::max(best, len);
    for (std::size_t j = i; j < items.size(); ++j) {
      if (last >= 0) {
        const auto& p = items[static_cast<std::size_t>(last)];
        if (items[j].first <= p.first) continue;
        if (!(p.second.max() < items[j].second.min())) continue;
      }
      go(j + 1, static_cast<int>(j), len + 1);
    }
  };
  go(0, -1, 0);
  return best;
}

}  // namespace brute
