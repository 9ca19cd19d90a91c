#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "sublis/engine.hpp"
#include "sublis/ptree.hpp"

using namespace sublis;

namespace {
BlockSequence iota_seq(std::size_t n) {
  std::vector<Value> v(n);
  std::iota(v.begin(), v.end(), Value{1});
  return BlockSequence::from_values(v);
}
}  // namespace

TEST_CASE("tree configuration errors") {
  CHECK_THROWS_AS(PrecisionTree::build(iota_seq(8), 0.5, 4, 1), ConfigError);
  CHECK_THROWS_AS(PrecisionTree::build(iota_seq(8), 0.0, 16, 1), ConfigError);
  CHECK_NOTHROW(PrecisionTree::build(iota_seq(8), 0.5, 8, 1));
}

TEST_CASE("root precision above one samples nothing") {
  QueryLedger ledger;
  auto t = PrecisionTree::build(iota_seq(256), 2.0, 16, 3, &ledger);
  CHECK(t.node_count() == 1);
  CHECK(t.sampled_leaves() == 0);
  CHECK(ledger.positions_read() == 0);
}

TEST_CASE("tree shape, padding and ledger") {
  QueryLedger ledger;
  auto y = iota_seq(300);
  auto t = PrecisionTree::build(y, 1.0 / 64, 16, 9, &ledger);
  CHECK(t.leaves() == 4096);
  CHECK(t.height() == 3);
  CHECK(ledger.positions_read() == t.sampled_leaves());
  for (auto [b, s] : ledger.positions()) CHECK(b < 300);
  for (NodeId id = 0; id < t.node_count(); ++id) {
    const auto& nd = t.node(id);
    if (id != t.root()) {
      CHECK(nd.z >= 1);
      CHECK(nd.z <= t.zmax());
    }
    if (nd.first_child != kNoNode) {
      CHECK(precision_ok(nd.precision));
      for (unsigned c = 0; c < t.beta(); ++c) {
        const auto& ch = t.node(t.child(id, c));
        CHECK(ch.precision == doctest::Approx(nd.precision * ch.z));
        CHECK(ch.level == nd.level + 1);
      }
    }
  }
  // Stored elements match the input.
  for (std::size_t b = 0; b < 300; ++b) {
    NodeId leaf = t.stored_leaf(b);
    if (leaf == kNoNode) continue;
    CHECK(t.element(leaf)[0] == y.at(b, 0));
    CHECK(ledger.was_read(b, 0));
  }
}

TEST_CASE("tree is deterministic in its seed and shape builds agree") {
  auto y = iota_seq(4096);
  auto a = PrecisionTree::build(y, 1.0 / 16, 16, 42);
  auto b = PrecisionTree::build(y, 1.0 / 16, 16, 42);
  auto s = PrecisionTree::build_shape(4096, 1.0 / 16, 16, 42);
  std::ostringstream da, db, ds;
  a.dump(da);
  b.dump(db);
  s.dump(ds);
  CHECK(da.str() == db.str());
  CHECK(da.str() == ds.str());
  auto c = PrecisionTree::build(y, 1.0 / 16, 16, 43);
  std::ostringstream dc;
  c.dump(dc);
  CHECK(da.str() != dc.str());
}

TEST_CASE("view navigation") {
  auto t = PrecisionTree::build_shape(4096, 1.0 / 256, 16, 5);
  auto v = t.view();
  CHECK(v.leaf_count() == 4096);
  CHECK(v.depth() == 3);
  auto top = v.top(1, 1.0);
  CHECK(top.leaf_count() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    auto loc = top.local(i, t.height());
    CHECK(loc.leaf_count() == 256);
    CHECK(loc.first_base_leaf(0) == i * 256);
    CHECK(loc.first_base_leaf(255) == i * 256 + 255);
  }
  CHECK(t.find(3, 1234) == v.leaf_node(1234));
}

TEST_CASE("trim boundary cases") {
  auto t = PrecisionTree::build_shape(256, 1.0 / 64, 16, 2);
  auto v = t.view();
  // tau = 1: the top tree is the root; its single local view is the full view.
  auto t1 = trim(v, 1, 1.0);
  CHECK(t1.top.leaf_count() == 1);
  auto whole = t1.local(0);
  REQUIRE(whole.has_value());
  CHECK(whole->leaf_count() == 256);
  CHECK(whole->root_precision() == doctest::Approx(v.root_precision()));
  // eta = 1: the top view keeps the original precisions.
  auto t16 = trim(v, 16, 1.0);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(t16.top.precision(t16.top.leaf_node(i)) == doctest::Approx(t.node(t.find(1, i)).precision));
    CHECK(t16.local(i).has_value() == precision_ok(t.node(t.find(1, i)).precision));
  }
  // Smaller eta rescales the top upward.
  auto small = trim(v, 16, 1.0 / 64);
  CHECK(small.top.root_precision() == doctest::Approx(1.0));
  CHECK_THROWS_AS(trim(v, 8, 1.0), ConfigError);
  CHECK_THROWS_AS(trim(v, 4096, 1.0), ConfigError);

  auto sizes = trim_tree<std::size_t>(
      v, 16, 1.0, [](std::size_t, const TreeView& w) { return w.leaf_count(); },
      [](const TreeView&, const std::vector<std::optional<std::size_t>>& vals) {
        std::size_t s = 0;
        for (auto& x : vals) s += x.value_or(0);
        return s;
      });
  CHECK(sizes % 16 == 0);
}

TEST_CASE("binomial and dominance cdfs") {
  auto c = binomial_cdf(4, 0.5, 4);
  CHECK(c[0] == doctest::Approx(1.0 / 16));
  CHECK(c[1] == doctest::Approx(5.0 / 16));
  CHECK(c[2] == doctest::Approx(11.0 / 16));
  CHECK(c[4] == doctest::Approx(1.0));
  // Ber(1/F)*Bin(k,2pF) dominates Bin(k,p) when F*p*k < 1/4.
  for (double F : {1.0, 2.0, 4.0})
    for (std::size_t k : {1u, 4u, 16u}) {
      const double p = 0.2 / (F * static_cast<double>(k));
      auto d = dominance_cdf(k, p, F, k);
      auto b = binomial_cdf(k, p, k);
      for (std::size_t j = 0; j <= k; ++j) CHECK(d[j] <= b[j] + 1e-12);
    }
  auto rng = CounterRng::derive(1, {});
  CHECK_THROWS_AS(dominance_thin(4, 0.1, 1.0, rng), PreconditionError);
  CHECK_THROWS_AS(dominance_thin(4, 0.01, 0.5, rng), PreconditionError);
}

TEST_CASE("quantile coupling stays below the source draw") {
  auto rng = CounterRng::derive(2, {});
  auto src = dominance_cdf(8, 0.02, 2.0, 8);
  auto tgt = binomial_cdf(8, 0.02, 8);
  for (std::size_t m = 0; m <= 8; ++m)
    for (int t = 0; t < 50; ++t) CHECK(quantile_couple(m, src, tgt, rng) <= m);
  CHECK_THROWS(quantile_couple(1, tgt, src, rng));
}

TEST_CASE("simulate_uniform returns present leaves and respects the root precision") {
  auto t = PrecisionTree::build_shape(4096, 1.0 / 64, 16, 77);
  auto v = t.view();
  auto rng = CounterRng::derive(3, {});
  SimulationStats st;
  for (int rep = 0; rep < 20; ++rep) {
    auto s = simulate_uniform(v, 1.0 / 64, rng, &st);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
    for (auto j : s) CHECK(v.present(j));
  }
  CHECK(st.direct_nodes + st.two_stage_couplings + st.one_stage_couplings > 0);
  CHECK_THROWS_AS(simulate_uniform(v, 1.0 / 128, rng), PrecisionError);
  CHECK_THROWS_AS(simulate_uniform(v, 0.0, rng), PreconditionError);
}

TEST_CASE("sods query agrees with a filtered scan") {
  std::vector<Value> vals(4096);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = (i * 2654435761u) % 10007 + 1;
  auto y = BlockSequence::from_values(vals);
  auto t = PrecisionTree::build(y, 1.0 / 64, 16, 8);
  TreeSource src(t);
  Sods sods(Window{t.view(), &src, 0}, 99);
  REQUIRE_FALSE(sods.grid().empty());
  CHECK(sods.grid().front() <= 1.0 / (t.root_delta() * 4096) * (1 + 1e-9));
  CHECK(sods.grid().back() >= 1.0 / 4096);
  CHECK(sods.best_rate(1.0) == sods.grid().front());
  CHECK(sods.best_rate(sods.grid().back() / 2) == 0.0);
  CHECK_THROWS_AS(sods.blocks(0.3), ConfigError);
  const double eta = sods.grid()[1];
  const auto Y = Interval::closed(2000, 6000);
  auto got = sods.query(eta, Y);
  std::vector<Coord> expect;
  std::vector<std::pair<Value, Coord>> scan;
  for (auto b : sods.blocks(eta)) {
    const Value v = src.value(b, 0);
    if (v != kNull && Y.contains(v)) scan.push_back({v, Coord{b, 0}});
  }
  std::sort(scan.begin(), scan.end());
  for (auto& [v, c] : scan) expect.push_back(c);
  CHECK(got == expect);
  // Same key, same sample.
  Sods again(Window{t.view(), &src, 0}, 99);
  CHECK(again.blocks(eta) == sods.blocks(eta));
}

TEST_CASE("parameter schedule") {
  ScheduleConfig cfg{16, 1.0, 1u << 16};
  auto s = parameter_schedule(1u << 16, 0.5, 0, cfg);
  CHECK(s.tau == 256);
  CHECK_FALSE(s.dense_only);
  CHECK(s.gamma_exponent == doctest::Approx(std::sqrt(0.5)));
  CHECK(parameter_schedule(8, 0.5, 0, cfg).tau == 1);
  CHECK(parameter_schedule(4096, 0.25, 0, cfg).tau == 16);
  // Deep enough levels are dense-only.
  auto deep = parameter_schedule(1u << 16, 0.5, 100, cfg);
  CHECK(deep.dense_only);
  CHECK(deep.gamma(10.0) == doctest::Approx(10.0));
  CHECK(cutoff_depth(0.25, 1.0) == doctest::Approx(2.0 * 2.0));
  for (std::size_t n : {16u, 100u, 4096u, 70000u})
    for (double e : {0.1, 0.25, 0.5, 0.9}) {
      auto sc = parameter_schedule(n, e, 0, {16, 1.0, n});
      CHECK(sc.tau >= 1);
      CHECK(sc.tau <= n);
    }
  CHECK(zeta_for(4096) == static_cast<std::size_t>(std::ceil(8 * std::log(4096.0))));
}
