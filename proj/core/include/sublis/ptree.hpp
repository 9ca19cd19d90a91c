#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sublis/core.hpp"
#include "sublis/oracle.hpp"
#include "sublis/rng.hpp"

namespace sublis {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

struct TreeNode {
  double precision = 0;         // P_v
  std::uint32_t z = 0;          // P_v / P_parent, 0 at the root
  std::uint32_t level = 0;      // root is level 0
  std::uint64_t index = 0;      // position within its level
  NodeId first_child = kNoNode;  // children are contiguous
  std::int64_t element = -1;     // offset of the stored block (leaves with P <= 1)
};

// Comparisons against 1 tolerate floating error in products like (1/64) * 64.
inline bool precision_ok(double p) { return p <= 1.0 + 1e-9; }

class TreeView;

class PrecisionTree {
 public:
  // Samples positions of y. y is padded with null blocks to a power of beta; padded blocks are
  // never recorded in the ledger.
  static PrecisionTree build(const BlockSequence& y, double delta, unsigned beta,
                             std::uint64_t seed, QueryLedger* ledger = nullptr);
  // Same randomness, no stored elements: used when the leaves are accessed through other means.
  static PrecisionTree build_shape(std::size_t n, double delta, unsigned beta, std::uint64_t seed);

  unsigned beta() const { return beta_; }
  unsigned zmax() const { return beta_ / 4; }
  double root_delta() const { return delta_; }
  unsigned height() const { return height_; }
  std::size_t leaves() const { return leaves_; }
  std::size_t original_blocks() const { return n_; }
  std::size_t width() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  bool has_elements() const { return has_elements_; }

  NodeId root() const { return 0; }
  const TreeNode& node(NodeId id) const { return nodes_[id]; }
  std::size_t node_count() const { return nodes_.size(); }
  NodeId child(NodeId id, std::size_t c) const {
    const auto fc = nodes_[id].first_child;
    return fc == kNoNode ? kNoNode : fc + static_cast<NodeId>(c);
  }
  // Node at (level, index) if materialized.
  NodeId find(unsigned level, std::uint64_t index) const;
  // Leaf node of block i if its element is stored.
  NodeId stored_leaf(std::size_t block) const {
    return block < leaf_of_block_.size() ? leaf_of_block_[block] : kNoNode;
  }
  std::span<const Value> element(NodeId leaf) const;

  std::size_t sampled_leaves() const;
  TreeView view() const;
  // Line format: `level index P sampled`.
  void dump(std::ostream& out) const;

 private:
  void grow(const BlockSequence* y, QueryLedger* ledger);

  unsigned beta_ = 16;
  double delta_ = 1;
  unsigned height_ = 0;
  std::size_t leaves_ = 1;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::uint64_t seed_ = 0;
  bool has_elements_ = false;
  std::vector<TreeNode> nodes_;
  std::vector<NodeId> leaf_of_block_;
  std::vector<Value> elements_;
};

// A subtree whose leaves sit at `leaf_level` and whose precisions are divided by `scale`.
// With scale < 1 this is the rescaled top tree of a trim; with leaf_level < height its leaves are
// internal nodes of the underlying tree.
class TreeView {
 public:
  TreeView() = default;
  TreeView(const PrecisionTree* tree, NodeId root, unsigned leaf_level, double scale)
      : tree_(tree), root_(root), leaf_level_(leaf_level), scale_(scale) {}

  const PrecisionTree& tree() const { return *tree_; }
  NodeId root() const { return root_; }
  unsigned leaf_level() const { return leaf_level_; }
  double scale() const { return scale_; }
  unsigned depth() const { return leaf_level_ - tree_->node(root_).level; }
  std::size_t leaf_count() const;
  double precision(NodeId id) const { return tree_->node(id).precision / scale_; }
  double root_precision() const { return precision(root_); }
  bool present_node(NodeId id) const { return id != kNoNode && precision_ok(precision(id)); }
  // Node of view leaf j, or kNoNode when it was never materialized.
  NodeId leaf_node(std::size_t j) const;
  bool present(std::size_t j) const { return present_node(leaf_node(j)); }
  // Index of the first underlying tree leaf covered by view leaf j.
  std::uint64_t first_base_leaf(std::size_t j) const;

  // Subtree of view leaf j at level leaf_level + 0, keeping leaves at `base_leaf_level`.
  TreeView local(std::size_t j, unsigned base_leaf_level) const;
  // View of the same root with leaves `levels` below the root and precisions divided by eta.
  TreeView top(unsigned levels, double eta) const;

  std::uint64_t identity() const;

 private:
  const PrecisionTree* tree_ = nullptr;
  NodeId root_ = 0;
  unsigned leaf_level_ = 0;
  double scale_ = 1.0;
};

// Binomial(n, p) CDF values F(0..upto).
std::vector<double> binomial_cdf(std::size_t n, double p, std::size_t upto);
// CDF of Ber(1/F) * Binomial(k, 2pF).
std::vector<double> dominance_cdf(std::size_t k, double p, double F, std::size_t upto);

// Y = Ber(1/F) * sum of k Ber(2pF) trials. Requires F >= 1 and F*p*k < 1/4.
std::size_t dominance_thin(std::size_t k, double p, double F, CounterRng& rng);

// Given a draw m from a law with CDF `source_cdf` that stochastically dominates the law with CDF
// `target_cdf`, returns a draw of the target law that is <= m (quantile coupling).
std::size_t quantile_couple(std::size_t m, const std::vector<double>& source_cdf,
                            const std::vector<double>& target_cdf, CounterRng& rng);

struct SimulationStats {
  std::size_t direct_nodes = 0;
  std::size_t two_stage_couplings = 0;
  std::size_t one_stage_couplings = 0;
};

// View leaves included i.i.d. with probability 1/(delta_prime * leaf_count), marginally over
// the tree randomness and the coins drawn from rng. delta_prime is rounded down to a reciprocal
// integer and must stay >= the view's root precision.
std::vector<std::size_t> simulate_uniform(const TreeView& view, double delta_prime, CounterRng& rng,
                                          SimulationStats* stats = nullptr);

// Per-slot value access used by SODS and the estimators.
class SlotSource {
 public:
  virtual ~SlotSource() = default;
  virtual std::size_t blocks() const = 0;
  virtual std::size_t width() const = 0;
  // Free read; kNull for empty slots and unreadable blocks.
  virtual Value value(std::size_t block, std::size_t slot) const = 0;
  // Metered genuineness check; plain sequences are always genuine.
  virtual bool alive(std::size_t block, std::size_t slot) {
    (void)block;
    (void)slot;
    return true;
  }
  virtual std::uint64_t salt() const = 0;
};

// Values stored in a tree's sampled leaves. Blocks the tree did not sample read as null.
class TreeSource final : public SlotSource {
 public:
  explicit TreeSource(const PrecisionTree& tree) : tree_(tree) {}
  std::size_t blocks() const override { return tree_.leaves(); }
  std::size_t width() const override { return tree_.width(); }
  Value value(std::size_t block, std::size_t slot) const override;
  std::uint64_t salt() const override { return 0x7265616c; }

 private:
  const PrecisionTree& tree_;
};

// Window: view leaves [0, leaf_count) correspond to source blocks [offset, offset + leaf_count).
struct Window {
  TreeView view;
  SlotSource* source = nullptr;
  std::size_t offset = 0;
};

// Sampling oracle over a window: per grid rate eta = 2^-i with 1/n <= eta <= 1/(P_root n),
// a simulated i.i.d. block sample and its sorted value index. Rates are built on first use.
class Sods {
 public:
  Sods(Window w, std::uint64_t key);

  const Window& window() const { return w_; }
  // Supported rates, largest first.
  const std::vector<double>& grid() const { return grid_; }
  bool on_grid(double eta) const;
  // Largest supported rate <= target, or 0 when none is.
  double best_rate(double target) const;

  const std::vector<std::size_t>& blocks(double eta);
  // Coordinates (view-relative block) of sampled slots with value in Y, in ascending value order.
  std::vector<Coord> query(double eta, const Interval& Y);

 private:
  struct Level {
    std::vector<std::size_t> blocks;
    std::vector<std::pair<Value, Coord>> sorted;
  };
  Level& level(double eta);

  Window w_;
  std::uint64_t key_;
  std::vector<double> grid_;
  std::map<double, Level> levels_;
};

// Eager form of the trim decomposition: level l = log_beta(tau) below the view root; each
// level-l node with (view) precision <= eta gets f(i, local view); the top view has precisions
// divided by eta. g sees f's values (nullopt where the subtree was not granted).
template <class R, class F, class G>
auto trim_tree(const TreeView& view, std::size_t tau, double eta, F&& f, G&& g);

// Lazy form used by the estimators: local(i) exposes the granted subtree of top leaf i.
struct TrimmedTree {
  TreeView top;
  unsigned base_leaf_level = 0;
  double base_scale = 1.0;
  std::size_t tau = 1;
  std::optional<TreeView> local(std::size_t i) const;
};
TrimmedTree trim(const TreeView& view, std::size_t tau, double eta);

unsigned log_base(std::size_t value, unsigned base);  // exact; throws ConfigError otherwise

template <class R, class F, class G>
auto trim_tree(const TreeView& view, std::size_t tau, double eta, F&& f, G&& g) {
  TrimmedTree t = trim(view, tau, eta);
  std::vector<std::optional<R>> values(tau);
  for (std::size_t i = 0; i < tau; ++i)
    if (auto sub = t.local(i)) values[i] = f(i, *sub);
  return g(t.top, values);
}

}  // namespace sublis
