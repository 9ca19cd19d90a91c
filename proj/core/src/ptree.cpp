#include "sublis/ptree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace sublis {
namespace {

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

std::uint64_t double_bits(double d) { return std::bit_cast<std::uint64_t>(d); }

}  // namespace

unsigned log_base(std::size_t value, unsigned base) {
  unsigned e = 0;
  std::size_t v = 1;
  while (v < value) {
    v *= base;
    ++e;
  }
  if (v != value) throw ConfigError(std::to_string(value) + " is not a power of " + std::to_string(base));
  return e;
}

PrecisionTree PrecisionTree::build(const BlockSequence& y, double delta, unsigned beta,
                                   std::uint64_t seed, QueryLedger* ledger) {
  PrecisionTree t;
  t.beta_ = beta;
  t.delta_ = delta;
  t.seed_ = seed;
  t.n_ = y.blocks();
  t.k_ = y.width();
  t.has_elements_ = true;
  t.grow(&y, ledger);
  return t;
}

PrecisionTree PrecisionTree::build_shape(std::size_t n, double delta, unsigned beta,
                                         std::uint64_t seed) {
  PrecisionTree t;
  t.beta_ = beta;
  t.delta_ = delta;
  t.seed_ = seed;
  t.n_ = n;
  t.k_ = 0;
  t.grow(nullptr, nullptr);
  return t;
}

void PrecisionTree::grow(const BlockSequence* y, QueryLedger* ledger) {
  if (beta_ < 8) throw ConfigError("beta must be at least 8");
  if (!(delta_ > 0.0)) throw ConfigError("root precision must be positive");
  height_ = 0;
  leaves_ = 1;
  while (leaves_ < n_) {
    leaves_ *= beta_;
    ++height_;
  }
  leaf_of_block_.assign(n_, kNoNode);
  nodes_.clear();
  nodes_.push_back(TreeNode{delta_, 0, 0, 0, kNoNode, -1});
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const TreeNode cur = nodes_[id];
    if (!precision_ok(cur.precision)) continue;
    if (cur.level == height_) {
      if (cur.index < n_) {
        leaf_of_block_[cur.index] = static_cast<NodeId>(id);
        if (y) {
          nodes_[id].element = static_cast<std::int64_t>(elements_.size());
          for (std::size_t j = 0; j < k_; ++j) {
            elements_.push_back(y->at(cur.index, j));
            if (ledger) ledger->record_position(cur.index, j);
          }
        }
      }
      continue;
    }
    nodes_[id].first_child = static_cast<NodeId>(nodes_.size());
    for (unsigned c = 0; c < beta_; ++c) {
      const std::uint64_t index = cur.index * beta_ + c;
      auto rng = CounterRng::derive(seed_, {cur.level + 1u, index});
      const auto z = static_cast<std::uint32_t>(rng.uniform_int(1, zmax()));
      nodes_.push_back(TreeNode{cur.precision * z, z, cur.level + 1, index, kNoNode, -1});
    }
  }
}

NodeId PrecisionTree::find(unsigned level, std::uint64_t index) const {
  if (level > height_) return kNoNode;
  NodeId cur = root();
  for (unsigned l = 1; l <= level; ++l) {
    const std::uint64_t digit = (index / ipow(beta_, level - l)) % beta_;
    cur = child(cur, digit);
    if (cur == kNoNode) return kNoNode;
  }
  return cur;
}

std::span<const Value> PrecisionTree::element(NodeId leaf) const {
  const auto off = nodes_[leaf].element;
  if (off < 0) return {};
  return std::span<const Value>(elements_).subspan(static_cast<std::size_t>(off), k_);
}

std::size_t PrecisionTree::sampled_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(leaf_of_block_.begin(), leaf_of_block_.end(), [](NodeId n) { return n != kNoNode; }));
}

TreeView PrecisionTree::view() const { return TreeView(this, root(), height_, 1.0); }

void PrecisionTree::dump(std::ostream& out) const {
  for (const auto& n : nodes_)
    out << n.level << ' ' << n.index << ' ' << n.precision << ' ' << (precision_ok(n.precision) ? 1 : 0)
        << '\n';
}

std::size_t TreeView::leaf_count() const { return ipow(tree_->beta(), depth()); }

NodeId TreeView::leaf_node(std::size_t j) const {
  const unsigned d = depth();
  const unsigned b = tree_->beta();
  NodeId cur = root_;
  for (unsigned l = 1; l <= d; ++l) {
    const std::uint64_t digit = (j / ipow(b, d - l)) % b;
    cur = tree_->child(cur, digit);
    if (cur == kNoNode) return kNoNode;
  }
  return cur;
}

std::uint64_t TreeView::first_base_leaf(std::size_t j) const {
  const auto& r = tree_->node(root_);
  return (r.index * leaf_count() + j) * ipow(tree_->beta(), tree_->height() - leaf_level_);
}

TreeView TreeView::local(std::size_t j, unsigned base_leaf_level) const {
  return TreeView(tree_, leaf_node(j), base_leaf_level, scale_);
}

TreeView TreeView::top(unsigned levels, double eta) const {
  return TreeView(tree_, root_, tree_->node(root_).level + levels, scale_ * eta);
}

std::uint64_t TreeView::identity() const {
  return mix_key(mix_key(root_, leaf_level_), double_bits(scale_));
}

std::vector<double> binomial_cdf(std::size_t n, double p, std::size_t upto) {
  std::vector<double> cdf(upto + 1, 1.0);
  if (p <= 0.0) return cdf;
  if (p >= 1.0) {
    for (std::size_t j = 0; j <= upto; ++j) cdf[j] = j >= n ? 1.0 : 0.0;
    return cdf;
  }
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  const double ratio = p / (1.0 - p);
  double acc = 0.0;
  for (std::size_t j = 0; j <= upto; ++j) {
    if (j <= n) acc += pmf;
    cdf[j] = std::min(1.0, j >= n ? 1.0 : acc);
    if (j < n) pmf *= static_cast<double>(n - j) / static_cast<double>(j + 1) * ratio;
  }
  return cdf;
}

std::vector<double> dominance_cdf(std::size_t k, double p, double F, std::size_t upto) {
  auto inner = binomial_cdf(k, std::min(1.0, 2.0 * p * F), upto);
  for (auto& c : inner) c = (1.0 - 1.0 / F) + c / F;
  return inner;
}

std::size_t dominance_thin(std::size_t k, double p, double F, CounterRng& rng) {
  if (!(F >= 1.0)) throw PreconditionError("dominance_thin requires F >= 1");
  if (p < 0.0 || p > 1.0) throw PreconditionError("dominance_thin requires p in [0,1]");
  if (!(F * p * static_cast<double>(k) < 0.25)) throw PreconditionError("dominance_thin requires F*p*k < 1/4");
  if (p == 0.0) return 0;
  if (!rng.bernoulli(1.0 / F)) return 0;
  std::size_t y = 0;
  for (std::size_t i = 0; i < k; ++i) y += rng.bernoulli(2.0 * p * F);
  return y;
}

std::size_t quantile_couple(std::size_t m, const std::vector<double>& source_cdf,
                            const std::vector<double>& target_cdf, CounterRng& rng) {
  if (source_cdf.size() <= m || target_cdf.size() <= m) throw std::invalid_argument("cdf too short");
  for (std::size_t j = 0; j <= m; ++j)
    if (target_cdf[j] + 1e-12 < source_cdf[j]) throw std::logic_error("source law does not dominate target");
  const double lo = m == 0 ? 0.0 : source_cdf[m - 1];
  const double hi = source_cdf[m];
  const double u = lo + (hi - lo) * (1.0 - rng.uniform01());  // in (lo, hi]
  std::size_t j = 0;
  while (j < m && target_cdf[j] < u) ++j;
  return j;
}

namespace {

struct Simulator {
  const TreeView& view;
  CounterRng& rng;
  SimulationStats* stats;
  unsigned beta;
  unsigned zmax;

  void run(NodeId v, std::size_t first, unsigned d, double q, std::vector<std::size_t>& out) {
    if (d == 0) {
      if (rng.bernoulli(q)) out.push_back(first);
      return;
    }
    const double nv = std::pow(static_cast<double>(beta), d);
    const std::size_t nu = static_cast<std::size_t>(nv) / beta;
    const double local_delta = 1.0 / (q * nv);
    const auto& tree = view.tree();
    if (local_delta <= 4.0 / beta + 1e-12) {
      if (stats) ++stats->direct_nodes;
      for (unsigned c = 0; c < beta; ++c) run(tree.child(v, c), first + c * nu, d - 1, q, out);
      return;
    }
    const double pv = view.precision(v);
    const double reach = std::floor(1.0 / pv + 1e-9);
    const double pi = std::min<double>(zmax, reach) / zmax;
    const double F = 1.0 / pi;
    const double nud = static_cast<double>(nu);
    std::vector<std::size_t> tmp;
    for (unsigned c = 0; c < beta; ++c) {
      const NodeId u = tree.child(v, c);
      if (!view.present_node(u)) continue;
      tmp.clear();
      run(u, first + c * nu, d - 1, 1.0 / nud, tmp);
      std::vector<double> source;
      std::size_t m;
      if (2.0 * q * F * nud <= 1.0 + 1e-12 && F * q * nud < 0.25) {
        // Thin the rate-1/n_u sample down to 2qF per leaf; the count then follows the
        // Ber(1/F) * Bin(n_u, 2qF) law, which dominates Bin(n_u, q).
        const double keep = 2.0 * q * F * nud;
        std::size_t w = 0;
        for (std::size_t x : tmp)
          if (rng.bernoulli(keep)) tmp[w++] = x;
        tmp.resize(w);
        m = tmp.size();
        source = dominance_cdf(nu, q, F, m);
        if (stats) ++stats->two_stage_couplings;
      } else {
        m = tmp.size();
        source = binomial_cdf(nu, 1.0 / nud, m);
        for (auto& s : source) s = (1.0 - pi) + pi * s;
        if (stats) ++stats->one_stage_couplings;
      }
      const auto target = binomial_cdf(nu, q, m);
      const std::size_t keep_count = quantile_couple(m, source, target, rng);
      for (std::size_t i = 0; i < keep_count; ++i) {
        const std::size_t r = i + static_cast<std::size_t>(rng.uniform_int(0, m - 1 - i));
        std::swap(tmp[i], tmp[r]);
        out.push_back(tmp[i]);
      }
    }
  }
};

}  // namespace

std::vector<std::size_t> simulate_uniform(const TreeView& view, double delta_prime, CounterRng& rng,
                                          SimulationStats* stats) {
  if (!(delta_prime > 0.0) || delta_prime > 1.0 + 1e-12)
    throw PreconditionError("delta' must lie in (0,1]");
  const double dp = 1.0 / std::ceil(1.0 / delta_prime - 1e-9);
  if (dp < view.root_precision() * (1.0 - 1e-9))
    throw PrecisionError("delta' is below the tree's root precision");
  const double q = 1.0 / (dp * static_cast<double>(view.leaf_count()));
  std::vector<std::size_t> out;
  Simulator sim{view, rng, stats, view.tree().beta(), view.tree().zmax()};
  sim.run(view.root(), 0, view.depth(), std::min(1.0, q), out);
  std::sort(out.begin(), out.end());
  return out;
}

Value TreeSource::value(std::size_t block, std::size_t slot) const {
  const NodeId leaf = tree_.stored_leaf(block);
  if (leaf == kNoNode) return kNull;
  auto e = tree_.element(leaf);
  return e.empty() ? kNull : e[slot];
}

Sods::Sods(Window w, std::uint64_t key) : w_(std::move(w)), key_(key) {
  const double n = static_cast<double>(w_.view.leaf_count());
  const double pr = w_.view.root_precision();
  if (!precision_ok(pr)) return;
  for (int i = 0;; ++i) {
    const double eta = std::ldexp(1.0, -i);
    if (eta * n < 1.0 - 1e-12) break;
    if (eta <= 1.0 / (pr * n) * (1.0 + 1e-9)) grid_.push_back(eta);
  }
}

bool Sods::on_grid(double eta) const {
  return std::find(grid_.begin(), grid_.end(), eta) != grid_.end();
}

double Sods::best_rate(double target) const {
  for (double eta : grid_)
    if (eta <= target * (1.0 + 1e-12)) return eta;
  return 0.0;
}

Sods::Level& Sods::level(double eta) {
  if (!on_grid(eta)) throw ConfigError("sampling rate is not on the supported grid");
  auto it = levels_.find(eta);
  if (it != levels_.end()) return it->second;
  Level lv;
  auto rng = CounterRng(mix_key(key_, double_bits(eta)));
  const double dp = 1.0 / (eta * static_cast<double>(w_.view.leaf_count()));
  lv.blocks = simulate_uniform(w_.view, std::min(1.0, dp), rng);
  const std::size_t k = w_.source ? w_.source->width() : 0;
  for (std::size_t b : lv.blocks) {
    const std::size_t block = w_.offset + b;
    if (!w_.source || block >= w_.source->blocks()) continue;
    for (std::size_t j = 0; j < k; ++j) {
      const Value v = w_.source->value(block, j);
      if (v != kNull) lv.sorted.push_back({v, Coord{b, j}});
    }
  }
  std::sort(lv.sorted.begin(), lv.sorted.end());
  return levels_.emplace(eta, std::move(lv)).first->second;
}

const std::vector<std::size_t>& Sods::blocks(double eta) { return level(eta).blocks; }

std::vector<Coord> Sods::query(double eta, const Interval& Y) {
  auto& lv = level(eta);
  std::vector<Coord> out;
  if (Y.empty()) return out;
  auto it = std::lower_bound(lv.sorted.begin(), lv.sorted.end(), std::make_pair(Y.min(), Coord{0, 0}));
  for (; it != lv.sorted.end() && it->first <= Y.max(); ++it) out.push_back(it->second);
  return out;
}

TrimmedTree trim(const TreeView& view, std::size_t tau, double eta) {
  const unsigned l = log_base(tau, view.tree().beta());
  if (l > view.depth()) throw ConfigError("tau exceeds the view's leaf count");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0,1]");
  TrimmedTree t;
  t.top = view.top(l, eta);
  t.base_leaf_level = view.leaf_level();
  t.base_scale = view.scale();
  t.tau = tau;
  return t;
}

std::optional<TreeView> TrimmedTree::local(std::size_t i) const {
  if (!top.present(i)) return std::nullopt;
  return TreeView(&top.tree(), top.leaf_node(i), base_leaf_level, base_scale);
}

}  // namespace sublis
