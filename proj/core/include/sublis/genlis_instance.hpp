#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "sublis/core.hpp"

namespace sublis {

// Metered access to hidden genuineness flags. Each distinct slot is charged once; later reads hit
// the cache.
class FlagOracle {
 public:
  using Source = std::function<bool(std::size_t block, std::size_t slot)>;

  FlagOracle(std::size_t n, std::size_t k, Source source, QueryLedger* ledger = nullptr);
  static std::shared_ptr<FlagOracle> from_flags(std::size_t n, std::size_t k,
                                                std::vector<std::uint8_t> flags,
                                                QueryLedger* ledger = nullptr);

  std::size_t blocks() const { return n_; }
  std::size_t width() const { return k_; }

  bool test(std::size_t block, std::size_t slot);
  // Oracle mode: reads the flag without metering or caching.
  bool peek(std::size_t block, std::size_t slot) const;
  bool tested(std::size_t block, std::size_t slot) const;
  std::size_t tests() const;

 private:
  std::size_t n_, k_;
  Source source_;
  QueryLedger* ledger_;
  mutable std::mutex mu_;
  std::vector<std::int8_t> cache_;  // -1 unknown
  std::size_t tests_ = 0;
};

// Blocks of (value, hidden flag) pairs. Values are free to read; flags go through the oracle.
// Slots may be views onto another instance's oracle (origin maps slot -> oracle slot).
template <class Elem>
struct BasicGenLisInstance {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::optional<Elem>> g1;  // n*k row-major
  std::vector<std::size_t> origin;      // n*k flat oracle index; empty means identity
  std::shared_ptr<FlagOracle> oracle;

  BasicGenLisInstance() = default;
  BasicGenLisInstance(std::size_t n_, std::size_t k_, std::shared_ptr<FlagOracle> o)
      : n(n_), k(k_), g1(n_ * k_), oracle(std::move(o)) {}

  const std::optional<Elem>& value(std::size_t i, std::size_t j) const { return g1[i * k + j]; }
  std::optional<Elem>& value(std::size_t i, std::size_t j) { return g1[i * k + j]; }

  std::size_t oracle_index(std::size_t i, std::size_t j) const {
    return origin.empty() ? i * k + j : origin[i * k + j];
  }
  bool test(std::size_t i, std::size_t j) const {
    const std::size_t o = oracle_index(i, j);
    return oracle->test(o / oracle->width(), o % oracle->width());
  }
  bool peek(std::size_t i, std::size_t j) const {
    const std::size_t o = oracle_index(i, j);
    return oracle->peek(o / oracle->width(), o % oracle->width());
  }
  std::size_t block_size(std::size_t i) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < k; ++j) c += value(i, j).has_value();
    return c;
  }
  std::size_t non_empty_blocks() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < n; ++i) d += block_size(i) > 0;
    return d;
  }
};

using GenLisInstance = BasicGenLisInstance<Value>;
using IntervalGenLisInstance = BasicGenLisInstance<Interval>;

// Integer instance over a block sequence with explicit flags (oracle-mode fixtures, tests).
GenLisInstance make_genlis_instance(const BlockSequence& values, std::vector<std::uint8_t> flags,
                                    QueryLedger* ledger = nullptr);

}  // namespace sublis
