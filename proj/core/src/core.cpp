#include "sublis/core.hpp"

#include <algorithm>
#include <cmath>

namespace sublis {

Interval Interval::closed(Value lo, Value hi) {
  if (lo > hi) throw DomainError("interval with lo > hi");
  if (hi == kInfinity) return at_least(lo);
  Interval r;
  r.lo_ = lo;
  r.hi_ = hi;
  r.hi_open_ = false;
  r.empty_ = false;
  return r;
}

Interval Interval::half_open(Value lo, Value hi) {
  if (lo > hi) throw DomainError("interval with lo > hi");
  if (lo == hi) return Interval();
  if (hi == kInfinity) return at_least(lo);
  return closed(lo, hi - 1);
}

Interval Interval::at_least(Value lo) {
  Interval r;
  r.lo_ = lo;
  r.hi_ = kInfinity;
  r.hi_open_ = true;
  r.empty_ = false;
  return r;
}

Value Interval::min() const {
  if (empty_) throw DomainError("min of empty interval");
  return lo_;
}

Value Interval::max() const {
  if (empty_) throw DomainError("max of empty interval");
  return hi_;
}

Value Interval::size() const {
  if (empty_) return 0;
  if (unbounded()) return kInfinity;
  return hi_ - lo_ + 1;
}

bool Interval::contains(Value v) const {
  if (empty_ || v == kNull) return false;
  return v >= lo_ && v <= hi_;
}

bool Interval::contains(const Interval& other) const {
  if (other.empty_) return true;
  if (empty_) return false;
  return other.lo_ >= lo_ && other.hi_ <= hi_;
}

Interval Interval::intersect(const Interval& other) const {
  if (empty_ || other.empty_) return Interval();
  const Value lo = std::max(lo_, other.lo_);
  const Value hi = std::min(hi_, other.hi_);
  if (lo > hi) return Interval();
  if (hi == kInfinity) return at_least(lo);
  return closed(lo, hi);
}

bool operator==(const Interval& a, const Interval& b) {
  if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
  return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

std::string Interval::str() const {
  if (empty_) return "{}";
  if (unbounded()) return "[" + std::to_string(lo_) + ",inf)";
  return "[" + std::to_string(lo_) + "," + std::to_string(hi_) + "]";
}

bool interval_less(const Interval& a, const Interval& b) {
  if (a.empty() || b.empty()) throw DomainError("interval order on empty interval");
  if (a.unbounded()) return false;
  return a.max() < b.min();
}

std::vector<std::uint64_t> power_grid(std::uint64_t b, std::uint64_t cap) {
  if (b < 2) throw DomainError("power_grid base must be >= 2");
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 1; v <= cap; v *= b) {
    out.push_back(v);
    if (v > cap / b) break;
  }
  return out;
}

std::uint64_t floor_power(std::uint64_t b, std::uint64_t cap) {
  auto grid = power_grid(b, std::max<std::uint64_t>(cap, 1));
  return grid.back();
}

BlockSequence::BlockSequence(std::size_t n, std::size_t k) : n_(n), k_(k), slots_(n * k, kNull) {}

BlockSequence BlockSequence::from_values(std::span<const Value> values) {
  BlockSequence y(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) y.set(i, 0, values[i]);
  return y;
}

BlockSequence BlockSequence::from_blocks(const std::vector<std::vector<Value>>& blocks, std::size_t k) {
  for (const auto& b : blocks) k = std::max(k, b.size());
  BlockSequence y(blocks.size(), k);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks[i].size(); ++j) y.set(i, j, blocks[i][j]);
  return y;
}

void BlockSequence::set(std::size_t block, std::size_t slot, Value v) {
  if (block >= n_ || slot >= k_) throw std::out_of_range("block sequence coordinate");
  slots_[block * k_ + slot] = v;
}

std::size_t BlockSequence::non_null(std::size_t block) const {
  auto b = this->block(block);
  return static_cast<std::size_t>(std::count_if(b.begin(), b.end(), [](Value v) { return v != kNull; }));
}

std::size_t BlockSequence::non_null_total() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](Value v) { return v != kNull; }));
}

Value BlockSequence::max_value() const {
  Value m = 0;
  for (Value v : slots_)
    if (v != kNull) m = std::max(m, v);
  return m;
}

BlockSequence BlockSequence::padded(std::size_t n) const {
  if (n < n_) throw std::invalid_argument("padding cannot shrink a sequence");
  BlockSequence out(n, k_);
  std::copy(slots_.begin(), slots_.end(), out.slots_.begin());
  return out;
}

std::vector<Value> BlockSequence::flat_values() const {
  std::vector<Value> out;
  out.reserve(slots_.size());
  for (Value v : slots_)
    if (v != kNull) out.push_back(v);
  return out;
}

BlockSequence remap_distinct(const BlockSequence& y) {
  const std::size_t n = y.blocks();
  BlockSequence out(n, y.width());
  if (n == 0) return out;
  const Value top = y.max_value();
  if (top != 0 && top > (kNull - 1) / n) throw DomainError("n * max value overflows 64 bits");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < y.width(); ++j) {
      const Value v = y.at(i, j);
      if (v == kNull) continue;
      if (v == 0) throw DomainError("remap_distinct requires values >= 1");
      out.set(i, j, n * v - (i + 1));
    }
  }
  return out;
}

double amplified_lambda(double delta, double q) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  const double p = q / (1.0 - q);
  return std::pow(delta, 1.0 + p);
}

std::uint64_t QueryLedger::pack(std::size_t block, std::size_t slot) {
  if (slot >= (std::size_t{1} << 20)) throw std::out_of_range("slot index too large for ledger");
  return (static_cast<std::uint64_t>(block) << 20) | slot;
}

void QueryLedger::record_position(std::size_t block, std::size_t slot) {
  std::lock_guard<std::mutex> lock(mu_);
  read_.insert(pack(block, slot));
}

std::size_t QueryLedger::positions_read() const {
  std::lock_guard<std::mutex> lock(mu_);
  return read_.size();
}

bool QueryLedger::was_read(std::size_t block, std::size_t slot) const {
  std::lock_guard<std::mutex> lock(mu_);
  return read_.count(pack(block, slot)) != 0;
}

std::vector<std::pair<std::size_t, std::size_t>> QueryLedger::positions() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  {
    std::lock_guard<std::mutex> lock(mu_);
    out.reserve(read_.size());
    for (auto key : read_) out.emplace_back(key >> 20, key & ((1u << 20) - 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sublis
