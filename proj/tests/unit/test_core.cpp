#include <doctest.h>

#include <cmath>
#include <sstream>

#include "brute.hpp"
#include "sublis/core.hpp"
#include "sublis/io.hpp"
#include "sublis/oracle.hpp"
#include "sublis/rng.hpp"

using namespace sublis;

TEST_CASE("interval basics") {
  auto a = Interval::closed(1, 3);
  CHECK(a.size() == 3);
  CHECK(a.contains(Value{3}));
  CHECK_FALSE(a.contains(Value{4}));
  auto h = Interval::half_open(2, 5);
  CHECK(h == Interval::closed(2, 4));
  CHECK(Interval::half_open(4, 4).empty());
  CHECK_THROWS_AS(Interval::closed(5, 4), DomainError);
  auto u = Interval::at_least(10);
  CHECK(u.unbounded());
  CHECK(u.size() == kInfinity);
  CHECK(u.contains(Value{1} << 40));
  CHECK(Interval::closed(1, 9).intersect(Interval::closed(5, 20)) == Interval::closed(5, 9));
  CHECK(Interval::closed(1, 3).intersect(Interval::closed(5, 20)).empty());
  CHECK(Interval::all().contains(Interval::closed(3, 4)));
}

TEST_CASE("interval_less examples") {
  CHECK(interval_less(Interval::closed(1, 3), Interval::closed(4, 9)));
  CHECK_FALSE(interval_less(Interval::closed(1, 5), Interval::closed(4, 9)));
  CHECK_FALSE(interval_less(Interval::point(2), Interval::point(2)));
  CHECK_THROWS_AS(interval_less(Interval(), Interval::point(1)), DomainError);
}

TEST_CASE("interval_less is a strict partial order on endpoints in [1,8]") {
  std::vector<Interval> all;
  for (Value lo = 1; lo <= 8; ++lo)
    for (Value hi = lo; hi <= 8; ++hi) all.push_back(Interval::closed(lo, hi));
  for (const auto& a : all) {
    CHECK_FALSE(interval_less(a, a));
    for (const auto& b : all) {
      if (interval_less(a, b)) CHECK_FALSE(interval_less(b, a));
      for (const auto& c : all)
        if (interval_less(a, b) && interval_less(b, c)) CHECK(interval_less(a, c));
    }
  }
}

TEST_CASE("monotone sets") {
  std::vector<IndexedValue<Value>> p{{1, 3}, {2, 5}, {4, 9}};
  CHECK(is_monotone_set(p));
  std::vector<IndexedValue<Value>> q{{1, 3}, {2, 3}};
  CHECK_FALSE(is_monotone_set(q));
  std::vector<IndexedValue<Interval>> r{{1, Interval::closed(1, 2)}, {2, Interval::closed(5, 7)}};
  CHECK(is_monotone_set(r));

  // Subset closure on random sets.
  auto rng = CounterRng::derive(7, {1});
  for (int t = 0; t < 200; ++t) {
    std::vector<IndexedValue<Value>> s;
    for (int i = 0; i < 6; ++i) s.push_back({rng.uniform_int(1, 6), rng.uniform_int(1, 6)});
    if (!is_monotone_set(s)) continue;
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      std::vector<IndexedValue<Value>> sub;
      for (int i = 0; i < 6; ++i)
        if (mask >> i & 1) sub.push_back(s[static_cast<std::size_t>(i)]);
      CHECK(is_monotone_set(sub));
    }
  }
}

TEST_CASE("power_grid") {
  CHECK(power_grid(2, 16) == std::vector<std::uint64_t>{1, 2, 4, 8, 16});
  CHECK(power_grid(2, 1) == std::vector<std::uint64_t>{1});
  CHECK(power_grid(3, 30) == std::vector<std::uint64_t>{1, 3, 9, 27});
  CHECK_THROWS_AS(power_grid(1, 8), DomainError);
  for (std::uint64_t b = 2; b <= 7; ++b)
    for (std::uint64_t cap = 1; cap <= 5000; cap += 37) {
      std::uint64_t expect = 0;
      for (std::uint64_t v = 1; v <= cap; v *= b) ++expect;
      CHECK(power_grid(b, cap).size() == expect);
    }
  CHECK(floor_power(16, 4095) == 256);
  CHECK(floor_power(16, 4096) == 4096);
}

TEST_CASE("remap_distinct examples") {
  auto y = BlockSequence::from_values(std::vector<Value>{2, 2, 2});
  auto r = remap_distinct(y);
  CHECK(r.flat_values() == std::vector<Value>{5, 4, 3});
  CHECK(lis_exact(r.flat_values()) == 1);
  r = remap_distinct(BlockSequence::from_values(std::vector<Value>{1, 2, 3}));
  CHECK(r.flat_values() == std::vector<Value>{2, 4, 6});
  r = remap_distinct(BlockSequence::from_values(std::vector<Value>{7}));
  CHECK(r.flat_values() == std::vector<Value>{6});
  CHECK_THROWS(remap_distinct(BlockSequence::from_values(std::vector<Value>{0, 1})));
}

TEST_CASE("remap_distinct preserves strict LIS") {
  auto rng = CounterRng::derive(11, {2});
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = rng.uniform_int(1, 256);
    std::vector<Value> v(n);
    for (auto& x : v) x = rng.uniform_int(1, 16);
    auto r = remap_distinct(BlockSequence::from_values(v));
    auto rv = r.flat_values();
    CHECK(lis_exact(rv) == lis_exact(v));
    std::sort(rv.begin(), rv.end());
    CHECK(std::adjacent_find(rv.begin(), rv.end()) == rv.end());
  }
}

TEST_CASE("amplified_lambda") {
  CHECK(amplified_lambda(0.25, 0.5) == doctest::Approx(0.0625));
  CHECK(amplified_lambda(0.5, 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(amplified_lambda(0.1, 0.5) == doctest::Approx(0.01));
  CHECK_THROWS_AS(amplified_lambda(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(amplified_lambda(1.0, 0.5), DomainError);
}

TEST_CASE("approx contract") {
  ApproxContract c{2.0, 1.0};
  CHECK(c.admits(4, 10));
  CHECK_FALSE(c.admits(3.9, 10));
  CHECK_FALSE(c.admits(11, 10));
}

TEST_CASE("query ledger counts distinct positions") {
  QueryLedger l;
  l.record_position(3, 0);
  l.record_position(3, 0);
  l.record_position(4, 1);
  l.record_test();
  CHECK(l.positions_read() == 2);
  CHECK(l.was_read(4, 1));
  CHECK_FALSE(l.was_read(4, 0));
  CHECK(l.genuineness_tests() == 1);
}

TEST_CASE("sequence io round trip and errors") {
  auto y = BlockSequence::from_blocks({{5, 1}, {2}, {}}, 2);
  std::stringstream ss;
  write_sequence(ss, y);
  CHECK(ss.str().find("n=3 k=2") == 0);
  auto back = read_sequence(ss);
  CHECK(back == y);

  std::istringstream bad("n=2 k=1\n# comment\n1\nfoo\n");
  try {
    read_sequence(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream missing("1\n2\n");
  CHECK_THROWS_AS(read_sequence(missing), ParseError);
  std::istringstream short_file("n=3 k=1\n1\n2\n");
  CHECK_THROWS_AS(read_sequence(short_file), ParseError);

  FlaggedSequence f{BlockSequence::from_blocks({{1, 3}, {2}}, 2), {1, 0, 1, 0}};
  std::stringstream fs;
  write_flagged(fs, f);
  auto fb = read_flagged(fs);
  CHECK(fb.values == f.values);
  CHECK(fb.flags[0] == 1);
  CHECK(fb.flags[1] == 0);
  CHECK(fb.flags[2] == 1);
}
