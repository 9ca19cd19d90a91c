#include "sublis/genlis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "sublis/reslis.hpp"

namespace sublis {

namespace {

// Block sampling only; no values.
class BlockOnlySource final : public SlotSource {
 public:
  BlockOnlySource(std::size_t n, std::uint64_t salt) : n_(n), salt_(salt) {}
  std::size_t blocks() const override { return n_; }
  std::size_t width() const override { return 0; }
  Value value(std::size_t, std::size_t) const override { return kNull; }
  std::uint64_t salt() const override { return salt_; }

 private:
  std::size_t n_;
  std::uint64_t salt_;
};

// g1 restricted to the coordinates of one bucket, made distinct; alive() tests genuineness.
class RestrictedSource final : public SlotSource {
 public:
  RestrictedSource(GenLisInstance& g, const std::vector<Coord>& coords, std::size_t blocks,
                   std::uint64_t salt)
      : g_(g), blocks_(blocks), salt_(salt), values_(g.n * g.k, kNull) {
    std::vector<Value> vs;
    vs.reserve(coords.size());
    for (const auto& c : coords) vs.push_back(*g.value(c.block, c.slot));
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    const Value nb = std::max<std::size_t>(blocks, g.n);
    for (const auto& c : coords) {
      const Value rank = std::lower_bound(vs.begin(), vs.end(), *g.value(c.block, c.slot)) - vs.begin();
      values_[c.block * g.k + c.slot] = nb * (rank + 1) - c.block;
    }
  }
  std::size_t blocks() const override { return blocks_; }
  std::size_t width() const override { return g_.k; }
  Value value(std::size_t block, std::size_t slot) const override {
    if (block >= g_.n) return kNull;
    return values_[block * g_.k + slot];
  }
  bool alive(std::size_t block, std::size_t slot) override {
    if (block >= g_.n || values_[block * g_.k + slot] == kNull) return false;
    return g_.test(block, slot);
  }
  std::uint64_t salt() const override { return salt_; }

 private:
  GenLisInstance& g_;
  std::size_t blocks_;
  std::uint64_t salt_;
  std::vector<Value> values_;
};

std::vector<std::uint64_t> e2(std::uint64_t cap) { return power_grid(2, std::max<std::uint64_t>(cap, 1)); }

GenLisResult genlis_core(Engine& engine, GenLisInstance& g, double lambda, double gamma, std::size_t tau,
                         const TreeView& view, unsigned depth, std::size_t n_eff) {
  auto& st = engine.stats();
  ++st.genlis_calls;
  st.max_depth = std::max(st.max_depth, depth);
  if (!precision_ok(view.root_precision())) throw ConfigError("tree precision is insufficient");
  GenLisResult res;
  if (n_eff == 0 || g.k == 0) return res;
  const std::size_t tests_before = g.oracle->tests();
  const std::size_t leaves = view.leaf_count();
  const double n = static_cast<double>(n_eff);
  const std::size_t zeta = zeta_for(n_eff, engine.params().zeta_constant);

  std::size_t present = 0;
  for (std::size_t j = 0; j < std::min(leaves, g.n); ++j) present += view.present(j);
  res.budget = static_cast<std::size_t>(std::ceil(10.0 * zeta * g.k / lambda)) + g.k * present;

  const auto sols = extract_pseudo_solutions(g, lambda, n_eff);
  res.solutions = sols.size();
  const auto buckets = bucket_solutions(sols, lambda, n_eff);

  // Dense estimator.
  const std::uint64_t dense_salt = engine.fresh_salt(engine.seed(), 0x64656e73);
  BlockOnlySource blocks_only(leaves, dense_salt);
  Sods sods(Window{view, &blocks_only, 0}, mix_key(engine.seed(), dense_salt));
  const double p = sods.best_rate(std::min(1.0, 10.0 * zeta / (lambda * n)));
  res.rate = p;
  double best_dense = 0;
  if (p > 0) {
    const auto& sampled = sods.blocks(p);
    std::vector<char> in_s(g.n, 0);
    for (std::size_t b : sampled)
      if (b < g.n) in_s[b] = 1, ++res.sampled_blocks;
    const double zeta_eff = p * lambda * n / 10.0;
    const std::size_t removal = p < 1.0 ? static_cast<std::size_t>(std::floor(zeta_eff)) : 0;
    for (const auto& bk : buckets) {
      if (bk.coords.empty()) continue;
      std::map<std::size_t, std::size_t> hits;
      for (const auto& c : bk.coords)
        if (in_s[c.block] && g.test(c.block, c.slot)) ++hits[c.block];
      std::vector<std::size_t> counts;
      for (auto& [b, h] : hits) counts.push_back(h);
      const std::size_t kappa = sum_without_largest(std::move(counts), removal);
      const double d = dense_estimate(bk.ell, static_cast<double>(kappa), lambda, n_eff, g.k,
                                      std::max(zeta_eff, 1e-300));
      best_dense = std::max(best_dense, d);
    }
  }
  res.dense = best_dense;

  // Sparse estimator: recursion into ResLIS on genuine slots of each bucket.
  double best_sparse = 0;
  if (gamma < static_cast<double>(g.k) / lambda) {
    const double lambda_s = std::min(1.0, lambda * n / static_cast<double>(leaves));
    for (const auto& bk : buckets) {
      if (bk.coords.empty()) continue;
      const std::uint64_t salt = engine.fresh_salt(engine.seed(), 0x73707273);
      RestrictedSource src(g, bk.coords, leaves, salt);
      std::size_t est = 0;
      if (engine.params().trim_heavy) {
        const std::uint64_t tsalt = engine.fresh_salt(salt, 0x7472696d);
        const Window w{view, &src, 0};
        const HeavyTrim ht = trim_heavy_blocks(engine.sods(w), Interval::all(), lambda_s, zeta);
        HeavyTrimmedSource trimmed(src, Interval::all(), ht, tsalt);
        est = est_reslis(engine, Window{view, &trimmed, 0}, Interval::all(), 0.3 * lambda_s, tau, depth);
        engine.release(tsalt);
      } else {
        est = est_reslis(engine, Window{view, &src, 0}, Interval::all(), lambda_s, tau, depth);
      }
      engine.release(salt);
      best_sparse = std::max(best_sparse, static_cast<double>(est));
    }
  }
  res.sparse = best_sparse;

  const double best = std::clamp(std::max(best_dense, best_sparse), 0.0, n);
  res.estimate = static_cast<std::size_t>(std::floor(best));
  res.tests = g.oracle->tests() - tests_before;
  return res;
}

}  // namespace

std::vector<std::vector<Coord>> extract_pseudo_solutions(const GenLisInstance& g, double lambda, std::size_t n) {
  if (n == 0) n = g.n;
  const std::size_t threshold =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(lambda * static_cast<double>(n) / 4.0 - 1e-9)));
  std::vector<SeqEntry> entries;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.k; ++j)
      if (const auto& v = g.value(i, j)) entries.push_back({Coord{i, j}, *v});
  entries = descending_layout(std::move(entries));
  std::vector<std::vector<Coord>> out;
  while (!entries.empty()) {
    auto r = lis_extract(entries);
    if (r.length < threshold) break;
    std::sort(r.indices.begin(), r.indices.end());
    std::erase_if(entries, [&](const SeqEntry& e) {
      return std::binary_search(r.indices.begin(), r.indices.end(), e.coord);
    });
    out.push_back(std::move(r.indices));
  }
  return out;
}

std::vector<double> bucket_grid(double lambda) {
  std::vector<double> out;
  for (auto v : e2(static_cast<std::uint64_t>(std::floor(4.0 / lambda + 1e-9)))) out.push_back(v / 4.0);
  return out;
}

std::vector<Bucket> bucket_solutions(const std::vector<std::vector<Coord>>& solutions, double lambda,
                                     std::size_t n) {
  std::vector<Bucket> out;
  const double ln = lambda * static_cast<double>(n);
  for (double ell : bucket_grid(lambda)) out.push_back(Bucket{ell, ln * ell / 2, ln * ell, {}, {}});
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const double len = static_cast<double>(solutions[s].size());
    std::size_t b = out.size() - 1;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (len > out[i].lo && len <= out[i].hi) {
        b = i;
        break;
      }
    out[b].members.push_back(s);
    out[b].coords.insert(out[b].coords.end(), solutions[s].begin(), solutions[s].end());
  }
  for (auto& b : out) std::sort(b.coords.begin(), b.coords.end());
  return out;
}

std::size_t sum_without_largest(std::vector<std::size_t> counts, std::size_t removed) {
  std::sort(counts.rbegin(), counts.rend());
  std::size_t total = 0;
  for (std::size_t i = std::min(removed, counts.size()); i < counts.size(); ++i) total += counts[i];
  return total;
}

double dense_estimate(double ell, double kappa, double lambda, std::size_t n, std::size_t k, double zeta) {
  const double nn = static_cast<double>(n);
  return lambda * lambda * ell * nn * kappa / (100.0 * static_cast<double>(k) * zeta) - lambda * nn / 4.0;
}

GenLisResult est_genlis(Engine& engine, GenLisInstance& g, double lambda, double gamma, std::size_t tau,
                        const TreeView& view, unsigned depth) {
  return genlis_core(engine, g, lambda, gamma, tau, view, depth, g.n);
}

GenLisResult sparse_genlis(Engine& engine, GenLisInstance& g, double lambda, const Schedule& sched,
                           const TreeView& view, unsigned depth) {
  const std::size_t d = g.non_empty_blocks();
  if (d == 0) return {};
  const double lp = std::min(1.0, lambda * static_cast<double>(g.n) / static_cast<double>(d));
  const double gamma = sched.gamma(static_cast<double>(g.k) / lp);
  return genlis_core(engine, g, lp, gamma, sched.tau, view, depth, d);
}

Value phi_ell(const Interval& I, std::uint64_t ell) {
  if (ell == 0 || I.empty() || I.unbounded()) throw DomainError("phi_ell: bad interval or class");
  const Value len = I.size();
  if (len < ell || len >= 2 * ell) throw DomainError("phi_ell: interval length outside [ell, 2 ell)");
  return I.min() / ell;
}

double interval_reduce(Engine& engine, IntervalGenLisInstance& g, double lambda, const TreeView& view,
                       const Schedule& sched, unsigned depth) {
  std::vector<Value> q;
  for (const auto& v : g.g1)
    if (v) q.push_back(v->min()), q.push_back(v->max());
  if (q.empty()) return 0;
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  auto rank = [&](Value v) { return static_cast<Value>(std::lower_bound(q.begin(), q.end(), v) - q.begin()); };
  std::vector<std::optional<Interval>> a(g.g1.size());
  for (std::size_t s = 0; s < g.g1.size(); ++s)
    if (g.g1[s]) a[s] = Interval::closed(rank(g.g1[s]->min()), rank(g.g1[s]->max()));

  double best = 0;
  const auto ells = e2(static_cast<std::uint64_t>(std::floor(2.0 * g.k / lambda + 1e-9)));
  for (std::uint64_t ell : ells) {
    GenLisInstance b(g.n, g.k, g.oracle);
    b.origin.resize(g.n * g.k);
    bool any = false;
    for (std::size_t s = 0; s < a.size(); ++s) {
      b.origin[s] = g.oracle_index(s / g.k, s % g.k);
      if (!a[s]) continue;
      const Value len = a[s]->size();
      if (len < ell || len >= 2 * ell) continue;
      b.g1[s] = phi_ell(*a[s], ell);
      any = true;
    }
    if (!any) continue;
    for (std::uint64_t e : e2(g.k)) {
      GenLisInstance bb = b;
      bool nonempty = false;
      for (std::size_t i = 0; i < g.n; ++i) {
        const std::size_t sz = b.block_size(i);
        if (sz >= e && sz < 2 * e) {
          nonempty = true;
          continue;
        }
        for (std::size_t j = 0; j < g.k; ++j) bb.value(i, j).reset();
      }
      if (!nonempty) continue;
      const auto r = sparse_genlis(engine, bb, lambda / 2, sched, view, depth);
      best = std::max(best, static_cast<double>(r.estimate) / 3.0);
    }
  }
  return best;
}

}  // namespace sublis
