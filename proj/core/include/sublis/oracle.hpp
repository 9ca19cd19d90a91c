#pragma once

#include <span>
#include <vector>

#include "sublis/core.hpp"
#include "sublis/genlis_instance.hpp"

namespace sublis {

struct Coord {
  std::size_t block = 0;
  std::size_t slot = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct ExtractionResult {
  std::vector<Coord> indices;
  std::size_t length = 0;
};

// Strictly increasing LIS length (patience sorting).
std::size_t lis_exact(std::span<const Value> seq);

// LIS using at most one slot per block: each block's values are laid out in descending order
// and the flattened sequence goes through lis_exact. Blocks are 0-based; X indexes blocks.
std::size_t block_lis_exact(const BlockSequence& y, const Interval& X, const Interval& Y);

// Same reduction for blocks given as value lists (order inside a block is irrelevant).
std::size_t lis_of_blocks(const std::vector<std::vector<Value>>& blocks);

// LIS over genuine slots only; reads flags unmetered.
std::size_t genlis_exact(const GenLisInstance& g);
// Interval-valued variant under the interval order (quadratic DP).
std::size_t genlis_exact(const IntervalGenLisInstance& g);

struct SeqEntry {
  Coord coord;
  Value value;
};

// An exact LIS of the entry sequence with its coordinates. Entries of one block must be
// consecutive; at most one per block is used because each block is visited in descending order.
ExtractionResult lis_extract(std::span<const SeqEntry> seq);

// Flatten the given slots of a block-ordered list into the descending-per-block layout.
std::vector<SeqEntry> descending_layout(std::vector<SeqEntry> entries);

}  // namespace sublis
