#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>

#include "sublis/core.hpp"
#include "sublis/ptree.hpp"

namespace sublis {

struct EstimatorParams {
  double epsilon = 0.25;
  double zeta_constant = 8.0;  // zeta = ceil(zeta_constant * ln n)
  double h_constant = 1.0;     // constant inside the recursion cutoff H
  bool trim_heavy = false;     // heavy-block trimming before sparse ResLIS calls
  std::size_t global_n = 0;    // top-level instance size, for the cutoff scale
  unsigned beta = 16;
  double precision_slack = 1.0;  // tree root precision is divided by this factor
};

std::size_t zeta_for(std::size_t n, double zeta_constant = 8.0);

struct Schedule {
  std::size_t tau = 1;
  double gamma_exponent = 1.0;  // gamma = t^exponent; exponent 1 means dense-only
  bool dense_only = true;
  double gamma(double t) const;
};

struct ScheduleConfig {
  unsigned beta = 16;
  double h_constant = 1.0;
  std::size_t global_n = 0;
};

// tau = instance_size^epsilon on the beta-power grid; gamma = t^sqrt(eps) above the cutoff depth,
// t (dense-only) at or below it.
Schedule parameter_schedule(std::size_t instance_size, double epsilon, unsigned depth,
                            const ScheduleConfig& cfg = {});
// Nesting depth from which the schedule is dense-only.
double cutoff_depth(double epsilon, double h_constant);

struct EngineStats {
  std::size_t reslis_calls = 0;
  std::size_t base_cases = 0;
  std::size_t memo_hits = 0;
  std::size_t genlis_calls = 0;
  std::size_t precision_exhausted = 0;
  std::size_t flag_evaluations = 0;
  unsigned max_depth = 0;
};

// Per-run state shared by the mutually recursive estimators: SODS cache, memo of ResLIS calls,
// ledger and counters. Not thread-safe; use one engine per run.
class Engine {
 public:
  Engine(EstimatorParams params, QueryLedger& ledger, std::uint64_t seed)
      : params_(params), ledger_(ledger), seed_(seed) {}

  const EstimatorParams& params() const { return params_; }
  QueryLedger& ledger() { return ledger_; }
  std::uint64_t seed() const { return seed_; }
  EngineStats& stats() { return stats_; }

  Sods& sods(const Window& w);
  // Drops cached SODS built over a source that is about to go away.
  void release(std::uint64_t salt);

  const std::size_t* memo_find(std::uint64_t key) const;
  void memo_store(std::uint64_t key, std::size_t value) { memo_[key] = value; }

  std::uint64_t fresh_salt(std::uint64_t parent, std::uint64_t tag) {
    return mix_key(mix_key(parent, tag), ++salt_counter_);
  }

 private:
  EstimatorParams params_;
  QueryLedger& ledger_;
  std::uint64_t seed_;
  EngineStats stats_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::unique_ptr<Sods>> sods_;
  std::unordered_map<std::uint64_t, std::size_t> memo_;
  std::uint64_t salt_counter_ = 0;
};

}  // namespace sublis
