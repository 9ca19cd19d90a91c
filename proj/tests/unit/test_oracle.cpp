#include <doctest.h>

#include "brute.hpp"
#include "sublis/genlis_instance.hpp"
#include "sublis/oracle.hpp"
#include "sublis/rng.hpp"

using namespace sublis;

TEST_CASE("lis_exact examples") {
  CHECK(lis_exact(std::vector<Value>{1, 2, 3, 4}) == 4);
  CHECK(lis_exact(std::vector<Value>{4, 3, 2, 1}) == 1);
  CHECK(lis_exact(std::vector<Value>{3, 1, 4, 1, 5, 9, 2, 6}) == 4);
  CHECK(brute::lis({3, 1, 4, 1, 5, 9, 2, 6}) == 4);
  CHECK(lis_exact(std::vector<Value>{2, 2, 2}) == 1);
  CHECK(lis_exact(std::vector<Value>{}) == 0);
}

TEST_CASE("lis_exact vs subset enumeration") {
  auto rng = CounterRng::derive(3, {1});
  for (int t = 0; t < 300; ++t) {
    std::vector<Value> v(rng.uniform_int(0, 14));
    for (auto& x : v) x = rng.uniform_int(1, 10);
    CHECK(lis_exact(v) == brute::lis(v));
  }
}

TEST_CASE("block_lis_exact examples") {
  auto y = BlockSequence::from_blocks({{5, 1}, {2, 6}});
  CHECK(block_lis_exact(y, Interval::closed(0, 1), Interval::closed(1, 6)) == 2);
  CHECK(block_lis_exact(y, Interval::closed(0, 1), Interval::closed(100, 200)) == 0);
  auto p = BlockSequence::from_values(std::vector<Value>{3, 1, 4, 1, 5, 9, 2, 6});
  CHECK(block_lis_exact(p, Interval::closed(0, 7), Interval::all()) == lis_exact(p.flat_values()));
}

TEST_CASE("block_lis_exact vs exhaustive search and monotonicity") {
  auto rng = CounterRng::derive(5, {2});
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = rng.uniform_int(1, 9), k = rng.uniform_int(1, 3);
    BlockSequence y(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (rng.bernoulli(0.8)) y.set(i, j, rng.uniform_int(1, 12));
    const std::size_t xlo = rng.uniform_int(0, n - 1), xhi = rng.uniform_int(xlo, n - 1);
    const Value ylo = rng.uniform_int(1, 12), yhi = rng.uniform_int(ylo, 12);
    const auto X = Interval::closed(xlo, xhi);
    const auto Y = Interval::closed(ylo, yhi);
    const std::size_t v = block_lis_exact(y, X, Y);
    CHECK(v == brute::block_lis(y, xlo, xhi, Y));
    CHECK(v <= block_lis_exact(y, Interval::closed(0, n - 1), Y));
    CHECK(v <= block_lis_exact(y, X, Interval::closed(1, 12)));
  }
}

TEST_CASE("partition sums of local LIS never exceed the global value") {
  auto rng = CounterRng::derive(9, {3});
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 64 * rng.uniform_int(1, 4), tau = 8;
    std::vector<Value> v(n);
    for (auto& x : v) x = rng.uniform_int(1, 500);
    auto y = BlockSequence::from_values(v);
    // Random monotone set of (part, value range) pairs.
    std::vector<Value> cuts{0};
    for (std::size_t i = 0; i < tau; ++i) cuts.push_back(rng.uniform_int(cuts.back(), 500));
    std::sort(cuts.begin(), cuts.end());
    std::size_t sum = 0;
    const std::size_t r = n / tau;
    for (std::size_t i = 0; i < tau; ++i) {
      if (!rng.bernoulli(0.7) || cuts[i + 1] <= cuts[i]) continue;
      sum += block_lis_exact(y, Interval::closed(i * r, (i + 1) * r - 1), Interval::half_open(cuts[i] + 1, cuts[i + 1] + 1));
    }
    CHECK(sum <= block_lis_exact(y, Interval::closed(0, n - 1), Interval::all()));
  }
}

TEST_CASE("genlis_exact") {
  auto g = make_genlis_instance(BlockSequence::from_values(std::vector<Value>{1, 3, 2}), {1, 0, 1});
  CHECK(genlis_exact(g) == 2);
  auto none = make_genlis_instance(BlockSequence::from_values(std::vector<Value>{1, 2, 3}), {0, 0, 0});
  CHECK(genlis_exact(none) == 0);
  auto all = make_genlis_instance(BlockSequence::from_blocks({{5, 1}, {2, 6}}), {1, 1, 1, 1});
  CHECK(genlis_exact(all) == 2);
  CHECK(all.oracle->tests() == 0);  // oracle mode is unmetered

  IntervalGenLisInstance iv(3, 1, FlagOracle::from_flags(3, 1, {1, 1, 1}));
  iv.value(0, 0) = Interval::closed(1, 4);
  iv.value(1, 0) = Interval::closed(3, 6);
  iv.value(2, 0) = Interval::closed(7, 9);
  CHECK(genlis_exact(iv) == 2);
}

TEST_CASE("lis_extract") {
  std::vector<SeqEntry> s{{{0, 0}, 1}, {{1, 0}, 2}, {{2, 0}, 3}};
  auto r = lis_extract(s);
  CHECK(r.length == 3);
  CHECK(r.indices.size() == 3);
  std::vector<SeqEntry> d{{{0, 0}, 2}, {{1, 0}, 1}};
  r = lis_extract(d);
  CHECK(r.length == 1);
  CHECK(r.indices == std::vector<Coord>{{0, 0}});
  CHECK(lis_extract(std::vector<SeqEntry>{}).length == 0);

  auto rng = CounterRng::derive(13, {4});
  for (int t = 0; t < 100; ++t) {
    std::vector<SeqEntry> e;
    std::vector<Value> vals;
    for (std::size_t i = 0; i < 64; ++i) {
      e.push_back({{i, 0}, rng.uniform_int(1, 100)});
      vals.push_back(e.back().value);
    }
    r = lis_extract(e);
    CHECK(r.length == lis_exact(vals));
    CHECK(r.indices.size() == r.length);
    for (std::size_t i = 1; i < r.indices.size(); ++i) {
      CHECK(r.indices[i - 1].block < r.indices[i].block);
      CHECK(e[r.indices[i - 1].block].value < e[r.indices[i].block].value);
    }
  }
}

TEST_CASE("descending layout keeps one slot per block in any chain") {
  std::vector<SeqEntry> e{{{1, 0}, 4}, {{0, 1}, 2}, {{0, 0}, 7}, {{1, 1}, 9}};
  auto d = descending_layout(e);
  CHECK(d[0].value == 7);
  CHECK(d[1].value == 2);
  CHECK(d[2].value == 9);
  CHECK(d[3].value == 4);
  auto r = lis_extract(d);
  CHECK(r.length == 2);
}
