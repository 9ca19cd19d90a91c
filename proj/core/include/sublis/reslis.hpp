#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sublis/engine.hpp"
#include "sublis/ptree.hpp"

namespace sublis {

struct Partition {
  std::size_t tau = 1;
  std::size_t radius = 0;
  std::vector<std::vector<Value>> samples;  // S_i, ascending
  double rate = 0;                 // realized block sampling rate
  double nominal_rate = 0;         // zeta * s / |X| before grid rounding and capping
  std::size_t stride = 1;          // rank stride used for thinning
  std::size_t sampled_blocks = 0;  // |S|
  std::size_t hits = 0;            // |W|
  std::vector<std::size_t> removed_blocks;

  std::size_t max_samples() const;
};

// Samples blocks of the SODS window at rate zeta*s/|X| (rounded down to the SODS grid), drops
// the heaviest sampled blocks and keeps every stride-th ranked value per interval. When the
// realized rate falls below the nominal one, stride and removal count use the effective
// zeta' = rate*|X|/s; at rate 1 nothing is removed.
Partition sample_and_partition(Sods& sods, const Interval& Y, std::size_t tau, double s, std::size_t zeta);

// Level-delta dyadic clusters [S_{k*delta+1}, S_{(k+1)*delta}] of a sorted list.
std::vector<Interval> dyadic_clusters(std::span<const Value> S, std::size_t delta);

struct RankRange {
  std::size_t lo = 1;  // 1-based, inclusive
  std::size_t hi = 1;
  friend bool operator==(const RankRange&, const RankRange&) = default;
};
// Exact cover of I by dyadic clusters of [1, m] (m padded to a power of two), in rank order.
std::vector<RankRange> dyadic_cover(std::size_t m, RankRange I);

// Per interval i, the candidate value intervals at level delta: candidate c spans samples
// S_{c*delta+1..(c+1)*delta} and extends up to (excluding) the next cluster's first sample.
using CandidateFamily = std::vector<std::vector<Interval>>;
CandidateFamily candidate_family(const Partition& part, std::size_t delta, const Interval& Y);

std::size_t decompose(Engine& engine, const Window& w, const Partition& part, const CandidateFamily& family,
                      double lambda, std::size_t tau, unsigned depth);

// Block-LIS estimate of the window restricted to values in Y.
std::size_t est_reslis(Engine& engine, const Window& w, const Interval& Y, double lambda, std::size_t tau,
                       unsigned depth = 0);

// Exact block-LIS over the present blocks of a window (the base case).
std::size_t exact_window(const Window& w, const Interval& Y);

struct HeavyTrim {
  std::optional<std::size_t> upsilon;  // nullopt: no trimming
  std::size_t sample_size = 0;
};
// Upsilon = the (1 - 0.6*lambda)-quantile of in-range counts over blocks sampled at rate
// zeta/(lambda*|X|).
HeavyTrim trim_heavy_blocks(Sods& sods, const Interval& Y, double lambda, std::size_t zeta);

// Source wrapper hiding every block with more than upsilon values in Y.
class HeavyTrimmedSource final : public SlotSource {
 public:
  HeavyTrimmedSource(SlotSource& inner, Interval Y, HeavyTrim trim, std::uint64_t salt)
      : inner_(inner), Y_(Y), trim_(trim), salt_(salt) {}
  std::size_t blocks() const override { return inner_.blocks(); }
  std::size_t width() const override { return inner_.width(); }
  Value value(std::size_t block, std::size_t slot) const override;
  bool alive(std::size_t block, std::size_t slot) override { return inner_.alive(block, slot); }
  std::uint64_t salt() const override { return salt_; }
  bool trimmed(std::size_t block) const;

 private:
  SlotSource& inner_;
  Interval Y_;
  HeavyTrim trim_;
  std::uint64_t salt_;
};

unsigned default_beta(std::size_t n);

struct EstimateOptions {
  std::uint64_t seed = 1;
  unsigned beta = 0;  // 0 selects max(16, power of two nearest to log2 n)
  bool exact = false;
  EstimatorParams params{};
};

struct EstimateReport {
  std::size_t n = 0;
  std::size_t estimate = 0;
  std::optional<std::size_t> exact;
  std::size_t positions_read = 0;
  std::size_t genuineness_tests = 0;
  unsigned beta = 16;
  double epsilon = 0;
  double lambda = 0;
  double delta = 0;
  std::size_t tau = 1;
  std::uint64_t seed = 0;
  double runtime_ms = 0;
  EngineStats stats;

  bool within_bound() const { return !exact || estimate <= *exact; }
  // `beta=..;eps=..;lambda=..;delta=..;tau=..`
  std::string params_trace() const;
};

EstimateReport estimate_lis_main(const BlockSequence& y, double lambda, double epsilon,
                                 const EstimateOptions& opts = {});

}  // namespace sublis
