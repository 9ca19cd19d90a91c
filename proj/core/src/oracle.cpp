#include "sublis/oracle.hpp"

#include <algorithm>

namespace sublis {

std::size_t lis_exact(std::span<const Value> seq) {
  std::vector<Value> tops;
  for (Value v : seq) {
    auto it = std::lower_bound(tops.begin(), tops.end(), v);
    if (it == tops.end())
      tops.push_back(v);
    else
      *it = v;
  }
  return tops.size();
}

std::size_t lis_of_blocks(const std::vector<std::vector<Value>>& blocks) {
  std::vector<Value> flat;
  for (const auto& b : blocks) {
    const std::size_t start = flat.size();
    for (Value v : b)
      if (v != kNull) flat.push_back(v);
    std::sort(flat.begin() + static_cast<std::ptrdiff_t>(start), flat.end(), std::greater<>());
  }
  return lis_exact(flat);
}

std::size_t block_lis_exact(const BlockSequence& y, const Interval& X, const Interval& Y) {
  if (X.empty() || Y.empty() || y.blocks() == 0) return 0;
  const std::size_t lo = X.min();
  const std::size_t hi = std::min<Value>(X.max(), y.blocks() - 1);
  std::vector<Value> flat;
  for (std::size_t i = lo; i <= hi && i < y.blocks(); ++i) {
    const std::size_t start = flat.size();
    for (Value v : y.block(i))
      if (Y.contains(v)) flat.push_back(v);
    std::sort(flat.begin() + static_cast<std::ptrdiff_t>(start), flat.end(), std::greater<>());
  }
  return lis_exact(flat);
}

std::size_t genlis_exact(const GenLisInstance& g) {
  std::vector<std::vector<Value>> blocks(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.k; ++j)
      if (g.value(i, j) && g.peek(i, j)) blocks[i].push_back(*g.value(i, j));
  return lis_of_blocks(blocks);
}

std::size_t genlis_exact(const IntervalGenLisInstance& g) {
  struct Item {
    std::size_t block;
    Interval iv;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.k; ++j)
      if (g.value(i, j) && g.peek(i, j)) items.push_back({i, *g.value(i, j)});
  std::vector<std::size_t> best(items.size(), 1);
  std::size_t out = 0;
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b)
      if (items[b].block < items[a].block && interval_less(items[b].iv, items[a].iv))
        best[a] = std::max(best[a], best[b] + 1);
    out = std::max(out, best[a]);
  }
  return out;
}

std::vector<SeqEntry> descending_layout(std::vector<SeqEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const SeqEntry& a, const SeqEntry& b) {
    if (a.coord.block != b.coord.block) return a.coord.block < b.coord.block;
    return a.value > b.value;
  });
  return entries;
}

ExtractionResult lis_extract(std::span<const SeqEntry> seq) {
  ExtractionResult out;
  if (seq.empty()) return out;
  std::vector<std::size_t> pile_top;  // entry index on top of each pile
  std::vector<Value> tops;
  std::vector<std::ptrdiff_t> pred(seq.size(), -1);
  std::vector<std::size_t> level(seq.size(), 0);
  for (std::size_t idx = 0; idx < seq.size(); ++idx) {
    const Value v = seq[idx].value;
    auto it = std::lower_bound(tops.begin(), tops.end(), v);
    const std::size_t p = static_cast<std::size_t>(it - tops.begin());
    if (p > 0) pred[idx] = static_cast<std::ptrdiff_t>(pile_top[p - 1]);
    level[idx] = p;
    if (it == tops.end()) {
      tops.push_back(v);
      pile_top.push_back(idx);
    } else {
      *it = v;
      pile_top[p] = idx;
    }
  }
  const std::size_t len = tops.size();
  std::size_t end = 0;
  while (level[end] + 1 != len) ++end;  // first entry completing a longest chain
  std::vector<Coord> chain;
  for (std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(end); cur >= 0; cur = pred[static_cast<std::size_t>(cur)])
    chain.push_back(seq[static_cast<std::size_t>(cur)].coord);
  std::reverse(chain.begin(), chain.end());
  out.indices = std::move(chain);
  out.length = len;
  return out;
}

}  // namespace sublis
