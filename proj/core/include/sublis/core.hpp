#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sublis {

using Value = std::uint64_t;

// Null slot marker. Also used as the +infinity endpoint of unbounded intervals.
inline constexpr Value kNull = std::numeric_limits<Value>::max();
inline constexpr Value kInfinity = kNull;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Finite intervals are normalized to closed form; hi() is the largest member.
class Interval {
 public:
  // Default-constructed interval is empty.
  Interval() = default;

  static Interval closed(Value lo, Value hi);
  static Interval half_open(Value lo, Value hi);
  static Interval at_least(Value lo);
  static Interval point(Value v) { return closed(v, v); }
  static Interval all() { return at_least(0); }
  static Interval empty_interval() { return Interval(); }

  Value lo() const { return lo_; }
  Value hi() const { return hi_; }
  bool hi_open() const { return hi_open_; }
  bool unbounded() const { return hi_ == kInfinity; }
  bool empty() const { return empty_; }

  // Smallest / largest contained integer. max() of an unbounded interval is kInfinity.
  Value min() const;
  Value max() const;
  // Number of contained integers, saturating at kInfinity.
  Value size() const;
  bool contains(Value v) const;
  bool contains(const Interval& other) const;
  Interval intersect(const Interval& other) const;

  friend bool operator==(const Interval& a, const Interval& b);
  std::string str() const;

 private:
  Value lo_ = 0;
  Value hi_ = 0;
  bool hi_open_ = false;
  bool empty_ = true;
};

// a < b in the interval order: every element of a is below every element of b.
bool interval_less(const Interval& a, const Interval& b);

template <class T>
struct IndexedValue {
  std::size_t index;
  T value;
};

namespace detail {
inline bool value_less(const Value& a, const Value& b) { return a < b; }
inline bool value_less(const Interval& a, const Interval& b) { return interval_less(a, b); }
}  // namespace detail

template <class T>
bool is_monotone_set(std::span<const IndexedValue<T>> pairs) {
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      if (p == q) continue;
      const auto& a = pairs[p];
      const auto& b = pairs[q];
      if ((a.index == b.index) != (a.value == b.value)) return false;
      if ((a.index < b.index) != detail::value_less(a.value, b.value)) return false;
    }
  }
  return true;
}

template <class T>
bool is_monotone_set(const std::vector<IndexedValue<T>>& pairs) {
  return is_monotone_set(std::span<const IndexedValue<T>>(pairs));
}

// {1, b, b^2, ...} intersected with [1, cap].
std::vector<std::uint64_t> power_grid(std::uint64_t b, std::uint64_t cap);

// Largest power of b that is <= cap (cap >= 1).
std::uint64_t floor_power(std::uint64_t b, std::uint64_t cap);

class BlockSequence {
 public:
  BlockSequence() = default;
  BlockSequence(std::size_t n, std::size_t k);

  static BlockSequence from_values(std::span<const Value> values);
  static BlockSequence from_blocks(const std::vector<std::vector<Value>>& blocks, std::size_t k = 0);

  std::size_t blocks() const { return n_; }
  std::size_t width() const { return k_; }

  Value at(std::size_t block, std::size_t slot) const { return slots_[block * k_ + slot]; }
  void set(std::size_t block, std::size_t slot, Value v);
  std::span<const Value> block(std::size_t i) const {
    return std::span<const Value>(slots_).subspan(i * k_, k_);
  }
  std::size_t non_null(std::size_t block) const;
  std::size_t non_null_total() const;
  // Largest non-null value, 0 when there is none.
  Value max_value() const;
  // Copy extended with null blocks up to n blocks.
  BlockSequence padded(std::size_t n) const;
  // Values of a width-1 sequence; nulls are skipped.
  std::vector<Value> flat_values() const;

  friend bool operator==(const BlockSequence&, const BlockSequence&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Value> slots_;
};

// Replace the value of block i (1-based) by n*value - i. Values must be >= 1 and n*max must fit.
BlockSequence remap_distinct(const BlockSequence& y);

// delta^(1+p) with p = q/(1-q).
double amplified_lambda(double delta, double q);

struct ApproxContract {
  double alpha = 1.0;
  double beta = 0.0;

  bool admits(double estimate, double truth) const {
    return estimate <= truth && estimate >= truth / alpha - beta;
  }
};

class QueryLedger {
 public:
  QueryLedger() = default;
  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  void record_position(std::size_t block, std::size_t slot);
  void record_test() { tests_.fetch_add(1, std::memory_order_relaxed); }

  std::size_t positions_read() const;
  std::size_t genuineness_tests() const { return tests_.load(std::memory_order_relaxed); }
  bool was_read(std::size_t block, std::size_t slot) const;
  std::vector<std::pair<std::size_t, std::size_t>> positions() const;

 private:
  static std::uint64_t pack(std::size_t block, std::size_t slot);

  mutable std::mutex mu_;
  std::unordered_set<std::uint64_t> read_;
  std::atomic<std::size_t> tests_{0};
};

}  // namespace sublis
