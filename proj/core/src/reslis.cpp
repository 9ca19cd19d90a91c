#include "sublis/reslis.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sublis/genlis.hpp"
#include "sublis/oracle.hpp"

namespace sublis {

namespace {

ScheduleConfig schedule_config(const EstimatorParams& p) { return {p.beta, p.h_constant, p.global_n}; }

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

std::uint64_t interval_key(const Interval& I) {
  if (I.empty()) return 0x656d707479;
  return mix_key(mix_key(I.min(), I.max()), I.unbounded());
}

std::vector<std::uint64_t> e2(std::uint64_t cap) { return power_grid(2, std::max<std::uint64_t>(cap, 1)); }

std::size_t in_range_count(const SlotSource& src, std::size_t block, const Interval& Y) {
  if (block >= src.blocks()) return 0;
  std::size_t c = 0;
  for (std::size_t j = 0; j < src.width(); ++j) {
    const Value v = src.value(block, j);
    c += v != kNull && Y.contains(v);
  }
  return c;
}

}  // namespace

std::size_t Partition::max_samples() const {
  std::size_t m = 0;
  for (const auto& s : samples) m = std::max(m, s.size());
  return m;
}

Partition sample_and_partition(Sods& sods, const Interval& Y, std::size_t tau, double s, std::size_t zeta) {
  const Window& w = sods.window();
  const std::size_t X = w.view.leaf_count();
  if (tau == 0 || X % tau != 0) throw ConfigError("tau must divide the window length");
  Partition part;
  part.tau = tau;
  part.radius = X / tau;
  part.samples.assign(tau, {});
  const double nominal = static_cast<double>(zeta) * s / static_cast<double>(X);
  part.nominal_rate = nominal;
  const double p = sods.best_rate(std::min(1.0, nominal));
  part.rate = p;
  if (p <= 0) return part;
  double zeta_eff = static_cast<double>(zeta);
  if (p < nominal) zeta_eff = p * static_cast<double>(X) / s;
  part.stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(zeta_eff)));
  const std::size_t removal = p < 1.0 ? static_cast<std::size_t>(std::floor(zeta_eff)) : 0;
  part.sampled_blocks = sods.blocks(p).size();

  std::vector<Coord> hits;
  for (const auto& c : sods.query(p, Y))
    if (w.source->alive(w.offset + c.block, c.slot)) hits.push_back(c);
  part.hits = hits.size();

  std::vector<std::pair<std::size_t, std::size_t>> per_block;  // (block, count)
  {
    std::vector<std::size_t> blocks;
    for (const auto& c : hits) blocks.push_back(c.block);
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t i = 0; i < blocks.size();) {
      std::size_t j = i;
      while (j < blocks.size() && blocks[j] == blocks[i]) ++j;
      per_block.push_back({blocks[i], j - i});
      i = j;
    }
  }
  std::stable_sort(per_block.begin(), per_block.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < std::min(removal, per_block.size()); ++i)
    part.removed_blocks.push_back(per_block[i].first);
  std::sort(part.removed_blocks.begin(), part.removed_blocks.end());

  std::vector<std::size_t> rank(tau, 0);
  for (const auto& c : hits) {  // ascending value order
    if (std::binary_search(part.removed_blocks.begin(), part.removed_blocks.end(), c.block)) continue;
    const std::size_t i = c.block / part.radius;
    if (++rank[i] % part.stride == 0)
      part.samples[i].push_back(w.source->value(w.offset + c.block, c.slot));
  }
  return part;
}

std::vector<Interval> dyadic_clusters(std::span<const Value> S, std::size_t delta) {
  if (delta == 0 || !std::has_single_bit(delta)) throw DomainError("delta must be a power of two");
  std::vector<Interval> out;
  for (std::size_t k = 0; (k + 1) * delta <= S.size(); ++k)
    out.push_back(Interval::closed(S[k * delta], S[(k + 1) * delta - 1]));
  return out;
}

std::vector<RankRange> dyadic_cover(std::size_t m, RankRange I) {
  if (I.lo < 1 || I.hi < I.lo || I.hi > m) throw DomainError("rank range outside [1, m]");
  // Bottom-up over the padded binary tree: an endpoint node is kept when its sibling falls outside I.
  std::vector<RankRange> left, right;
  auto lo = static_cast<std::int64_t>(I.lo) - 1, hi = static_cast<std::int64_t>(I.hi) - 1;
  std::size_t width = 1;
  while (lo <= hi) {
    if (lo % 2 == 1) {
      left.push_back({static_cast<std::size_t>(lo) * width + 1, static_cast<std::size_t>(lo + 1) * width});
      ++lo;
    }
    if (hi % 2 == 0 && lo <= hi) {
      right.push_back({static_cast<std::size_t>(hi) * width + 1, static_cast<std::size_t>(hi + 1) * width});
      --hi;
    }
    lo /= 2;
    hi = hi < 0 ? -1 : hi / 2;
    width *= 2;
  }
  std::vector<RankRange> out(left.begin(), left.end());
  out.insert(out.end(), right.rbegin(), right.rend());
  return out;
}

CandidateFamily candidate_family(const Partition& part, std::size_t delta, const Interval& Y) {
  CandidateFamily fam(part.samples.size());
  for (std::size_t i = 0; i < part.samples.size(); ++i) {
    const auto& S = part.samples[i];
    const std::size_t m = S.size();
    if (delta == 0 || m < delta) continue;
    const std::size_t count = m / delta;
    for (std::size_t c = 0; c < count; ++c) {
      const Value lo = S[c * delta];
      Interval I = c + 1 < count ? Interval::half_open(lo, S[(c + 1) * delta]) : Interval::closed(lo, S[m - 1]);
      I = I.intersect(Y);
      if (!I.empty()) fam[i].push_back(I);
    }
  }
  return fam;
}

std::size_t exact_window(const Window& w, const Interval& Y) {
  if (!w.source) return 0;
  std::vector<std::vector<Value>> blocks;
  const std::size_t X = w.view.leaf_count();
  for (std::size_t j = 0; j < X; ++j) {
    if (!w.view.present(j)) continue;
    const std::size_t b = w.offset + j;
    if (b >= w.source->blocks()) continue;
    std::vector<Value> vs;
    for (std::size_t s = 0; s < w.source->width(); ++s) {
      const Value v = w.source->value(b, s);
      if (v != kNull && Y.contains(v) && w.source->alive(b, s)) vs.push_back(v);
    }
    if (!vs.empty()) blocks.push_back(std::move(vs));
  }
  return lis_of_blocks(blocks);
}

std::size_t decompose(Engine& engine, const Window& w, const Partition& part, const CandidateFamily& family,
                      double lambda, std::size_t tau, unsigned depth) {
  const std::size_t r = part.radius;
  std::size_t width = 0;
  for (const auto& f : family) width = std::max(width, f.size());
  if (width == 0 || r == 0) return 0;
  const auto& params = engine.params();
  const auto cfg = schedule_config(params);
  const std::size_t child_tau = parameter_schedule(r, params.epsilon, depth + 1, cfg).tau;
  const Schedule global = parameter_schedule(tau, params.epsilon, depth + 1, cfg);
  const double p_root = w.view.root_precision();
  const double zeta_tau = static_cast<double>(zeta_for(tau, params.zeta_constant));

  std::size_t best = 0;
  for (std::uint64_t rho : e2(static_cast<std::uint64_t>(std::floor(1.0 / lambda + 1e-9)))) {
    const std::size_t kappa = r / rho;
    if (kappa == 0 || kappa >= r) continue;
    const double lambda_g = std::min(1.0, lambda * static_cast<double>(rho));
    const double delta_global = std::min(1.0, lambda_g / (10.0 * zeta_tau));
    const double eta = std::min(1.0, p_root / delta_global);
    const TrimmedTree tt = trim(w.view, tau, eta);
    const double local_lambda = 1.0 / static_cast<double>(rho);

    auto flag = [&engine, &w, &tt, &family, r, kappa, child_tau, local_lambda, depth](std::size_t i,
                                                                                     std::size_t j) {
      if (i >= family.size() || j >= family[i].size()) return false;
      auto sub = tt.local(i);
      if (!sub) {
        ++engine.stats().precision_exhausted;
        return false;
      }
      ++engine.stats().flag_evaluations;
      const Window lw{*sub, w.source, w.offset + i * r};
      return est_reslis(engine, lw, family[i][j], local_lambda, child_tau, depth + 1) > kappa;
    };
    auto oracle = std::make_shared<FlagOracle>(tau, width, flag, &engine.ledger());
    IntervalGenLisInstance inst(tau, width, oracle);
    for (std::size_t i = 0; i < tau; ++i)
      for (std::size_t j = 0; j < family[i].size(); ++j) inst.value(i, j) = family[i][j];
    const double est = interval_reduce(engine, inst, lambda_g, tt.top, global, depth + 1);
    const auto g = static_cast<std::size_t>(std::floor(est * 0.5 * static_cast<double>(kappa)));
    best = std::max(best, g);
  }
  return best;
}

std::size_t est_reslis(Engine& engine, const Window& w, const Interval& Y, double lambda, std::size_t tau,
                       unsigned depth) {
  auto& st = engine.stats();
  ++st.reslis_calls;
  st.max_depth = std::max(st.max_depth, depth);
  const std::uint64_t key =
      mix_key(mix_key(mix_key(w.view.identity(), w.offset), mix_key(w.source ? w.source->salt() : 0, interval_key(Y))),
              mix_key(mix_key(bits(lambda), tau), depth));
  if (const auto* hit = engine.memo_find(key)) {
    ++st.memo_hits;
    return *hit;
  }
  const std::size_t X = w.view.leaf_count();
  const double rp = w.view.root_precision();
  std::size_t result = 0;
  if (!w.source || Y.empty()) {
    result = 0;
  } else if (!precision_ok(rp)) {
    ++st.precision_exhausted;
  } else {
    const std::size_t tau_eff = std::min<std::size_t>(tau, X);
    const double c = 1.0 / rp;
    if (static_cast<double>(X) < c * (1.0 - 1e-9) || X <= 1 || tau_eff >= X || tau_eff <= 1) {
      ++st.base_cases;
      result = exact_window(w, Y);
    } else {
      const std::size_t zeta = zeta_for(X, engine.params().zeta_constant);
      const double s = static_cast<double>(tau_eff) / lambda;
      const Partition part = sample_and_partition(engine.sods(w), Y, tau_eff, s, zeta);
      for (std::uint64_t delta : e2(part.max_samples())) {
        if (part.max_samples() == 0) break;
        const auto fam = candidate_family(part, delta, Y);
        result = std::max(result, decompose(engine, w, part, fam, lambda, tau_eff, depth));
      }
      result = std::min(result, X);
    }
  }
  engine.memo_store(key, result);
  return result;
}

Value HeavyTrimmedSource::value(std::size_t block, std::size_t slot) const {
  if (trimmed(block)) return kNull;
  return inner_.value(block, slot);
}

bool HeavyTrimmedSource::trimmed(std::size_t block) const {
  if (!trim_.upsilon) return false;
  return in_range_count(inner_, block, Y_) > *trim_.upsilon;
}

HeavyTrim trim_heavy_blocks(Sods& sods, const Interval& Y, double lambda, std::size_t zeta) {
  HeavyTrim out;
  const Window& w = sods.window();
  const double X = static_cast<double>(w.view.leaf_count());
  const double p = sods.best_rate(std::min(1.0, static_cast<double>(zeta) / (lambda * X)));
  if (p <= 0 || !w.source) return out;
  std::vector<std::size_t> counts;
  for (std::size_t b : sods.blocks(p)) counts.push_back(in_range_count(*w.source, w.offset + b, Y));
  out.sample_size = counts.size();
  if (counts.empty()) return out;
  std::sort(counts.begin(), counts.end());
  const double q = std::clamp(1.0 - 0.6 * lambda, 0.0, 1.0);
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(q * static_cast<double>(counts.size())) - 1));
  out.upsilon = counts[std::min(idx, counts.size() - 1)];
  return out;
}

unsigned default_beta(std::size_t n) {
  if (n < 4) return 16;
  const double lg = std::log2(static_cast<double>(n));
  const auto e = static_cast<unsigned>(std::lround(std::log2(lg)));
  return std::max(16u, 1u << e);
}

std::string EstimateReport::params_trace() const {
  std::ostringstream os;
  os << "beta=" << beta << ";eps=" << epsilon << ";lambda=" << lambda << ";delta=" << delta << ";tau=" << tau;
  return os.str();
}

EstimateReport estimate_lis_main(const BlockSequence& y, double lambda, double epsilon, const EstimateOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = y.blocks();
  if (y.width() != 1) throw ConfigError("estimate_lis_main expects one value per block");
  if (n < 2) throw ConfigError("sequence too short");
  if (!(lambda > 1.0 / static_cast<double>(n) && lambda < 1.0)) throw ConfigError("lambda must lie in (1/n, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");

  BlockSequence shifted = y;
  bool has_zero = false;
  for (std::size_t i = 0; i < n; ++i) has_zero |= y.at(i, 0) == 0;
  if (has_zero)
    for (std::size_t i = 0; i < n; ++i)
      if (y.at(i, 0) != kNull) shifted.set(i, 0, y.at(i, 0) + 1);
  const BlockSequence distinct = remap_distinct(shifted);

  EstimateReport rep;
  rep.n = n;
  rep.seed = opts.seed;
  rep.epsilon = epsilon;
  rep.lambda = lambda;
  rep.beta = opts.beta ? opts.beta : default_beta(n);
  rep.delta = lambda * std::pow(static_cast<double>(n), -epsilon) / std::max(1.0, opts.params.precision_slack);

  QueryLedger ledger;
  const PrecisionTree tree =
      PrecisionTree::build(distinct, rep.delta, rep.beta, derive_key(opts.seed, {0x74726565}), &ledger);
  EstimatorParams params = opts.params;
  params.epsilon = epsilon;
  params.beta = rep.beta;
  params.global_n = n;
  const Schedule sched = parameter_schedule(n, epsilon, 0, schedule_config(params));
  rep.tau = sched.tau;
  Engine engine(params, ledger, derive_key(opts.seed, {0x656e67}));
  TreeSource src(tree);
  const Window w{tree.view(), &src, 0};
  const double lambda_pad = lambda * static_cast<double>(n) / static_cast<double>(tree.leaves());
  rep.estimate = std::min(est_reslis(engine, w, Interval::all(), lambda_pad, sched.tau, 0), n);
  rep.positions_read = ledger.positions_read();
  rep.genuineness_tests = ledger.genuineness_tests();
  rep.stats = engine.stats();
  if (opts.exact) rep.exact = block_lis_exact(y, Interval::half_open(0, n), Interval::all());
  rep.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sublis
