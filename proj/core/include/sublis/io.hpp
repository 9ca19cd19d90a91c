#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sublis/core.hpp"

namespace sublis {

// Text format: header `n=<int> k=<int>`, then one block per line with whitespace-separated
// slots, `_` for null. Blank lines and lines starting with '#' are ignored.
BlockSequence read_sequence(std::istream& in);
BlockSequence read_sequence_file(const std::string& path);
void write_sequence(std::ostream& out, const BlockSequence& y);
void write_sequence_file(const std::string& path, const BlockSequence& y);

// Oracle-mode fixture: the same format with a `|` column followed by one 0/1 flag per slot.
struct FlaggedSequence {
  BlockSequence values;
  std::vector<std::uint8_t> flags;  // n*k, row-major
};
FlaggedSequence read_flagged(std::istream& in);
void write_flagged(std::ostream& out, const FlaggedSequence& f);

}  // namespace sublis
