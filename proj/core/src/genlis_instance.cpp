#include "sublis/genlis_instance.hpp"

namespace sublis {

FlagOracle::FlagOracle(std::size_t n, std::size_t k, Source source, QueryLedger* ledger)
    : n_(n), k_(k), source_(std::move(source)), ledger_(ledger), cache_(n * k, -1) {}

std::shared_ptr<FlagOracle> FlagOracle::from_flags(std::size_t n, std::size_t k,
                                                   std::vector<std::uint8_t> flags,
                                                   QueryLedger* ledger) {
  if (flags.size() != n * k) throw std::invalid_argument("flag vector size mismatch");
  auto shared = std::make_shared<std::vector<std::uint8_t>>(std::move(flags));
  return std::make_shared<FlagOracle>(
      n, k, [shared, k](std::size_t i, std::size_t j) { return (*shared)[i * k + j] != 0; },
      ledger);
}

bool FlagOracle::test(std::size_t block, std::size_t slot) {
  const std::size_t idx = block * k_ + slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_[idx] >= 0) return cache_[idx] != 0;
  }
  // Evaluated outside the lock: a flag may itself trigger nested estimator runs.
  const bool flag = source_(block, slot);
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_[idx] < 0) {
    cache_[idx] = flag ? 1 : 0;
    ++tests_;
    if (ledger_) ledger_->record_test();
  }
  return cache_[idx] != 0;
}

bool FlagOracle::peek(std::size_t block, std::size_t slot) const { return source_(block, slot); }

bool FlagOracle::tested(std::size_t block, std::size_t slot) const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_[block * k_ + slot] >= 0;
}

std::size_t FlagOracle::tests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return tests_;
}

GenLisInstance make_genlis_instance(const BlockSequence& values, std::vector<std::uint8_t> flags,
                                    QueryLedger* ledger) {
  const std::size_t n = values.blocks(), k = values.width();
  GenLisInstance g(n, k, FlagOracle::from_flags(n, k, std::move(flags), ledger));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (values.at(i, j) != kNull) g.value(i, j) = values.at(i, j);
  return g;
}

}  // namespace sublis
