#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emt/random.hpp"
#include "emt/scorer.hpp"

namespace emt {

struct Memory {
  std::vector<double> key;
  double value = 0.0;
  std::uint64_t last_access = 0;
  std::uint64_t order = 0;  // insertion sequence, tie-break only
};

struct TreeConfig {
  static constexpr std::size_t kDefaultLeafCapacity = 100;

  std::size_t leaf_capacity = kDefaultLeafCapacity;
  std::optional<std::size_t> memory_budget;
  std::uint64_t seed = 0;
  double learning_rate = Scorer::kDefaultLearningRate;
  PairFeaturizer featurizer = PairFeaturizer::AbsDiff;

  /// Throws InvalidInput on c < 2 or a zero budget.
  void validate() const;
};

enum class Side { Left, Right };

/// Projection threshold below which a split is considered degenerate.
inline constexpr double kSplitTieTolerance = 1e-12;

struct Node {
  // Internal
  std::vector<double> router;
  double boundary = 0.0;
  std::unique_ptr<Node> left;
  std::unique_ptr<Node> right;
  // Leaf
  std::vector<Memory> memories;
  bool deferred = false;  // last split attempt found no usable boundary

  bool is_leaf() const noexcept { return left == nullptr; }
};

/// Left iff <router, key> <= boundary.
Side route(const Node& internal, std::span<const double> key);

/// Result of splitting projections at the lower median. `boundary` is absent
/// when the projections are all equal within kSplitTieTolerance.
std::optional<double> split_boundary(std::span<const double> projections);

struct Recall {
  std::vector<double> key;
  double value;
};

struct TreeStats {
  std::size_t leaves = 0;
  std::size_t internal_nodes = 0;
  std::size_t max_depth = 0;
  std::size_t deferred_leaves = 0;
  std::size_t largest_leaf = 0;
  std::size_t largest_deferred_leaf = 0;
};

/// Eigen Memory Tree: a binary tree of episodic (key, value) memories.
/// Internal nodes route by projecting onto an approximate top eigenvector of
/// the memories they held when they split; leaves pick a memory with the
/// global learned scorer.
///
/// Single writer: query mutates access ticks, so even reads need exclusive
/// access.
class Emt {
 public:
  Emt(std::size_t dim, TreeConfig config);

  /// Nearest stored memory in the leaf the key routes to, or nothing when that
  /// leaf is empty. Marks the winner as accessed.
  std::optional<Recall> query(std::span<const double> key);

  /// Score-update, insert, split when full, then evict down to the budget.
  void learn(std::span<const double> key, double value);

  /// Removes the memory with the globally smallest access tick.
  Memory evict_lru();

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return count_; }
  std::uint64_t clock() const noexcept { return clock_; }
  const TreeConfig& config() const noexcept { return config_; }
  const Scorer& scorer() const noexcept { return scorer_; }
  const Node& root() const noexcept { return *root_; }

  /// Leaf a key routes to, without touching any state.
  const Node& locate(std::span<const double> key) const;
  std::size_t depth_of(std::span<const double> key) const;

  TreeStats stats() const;

  /// Number of splits that were deferred because all projections tied.
  std::size_t deferred_splits() const noexcept { return deferred_splits_; }

  /// Pre-order text dump. Internal nodes: `I r_1 .. r_d boundary`; leaves:
  /// `L n` followed by n lines `k_1 .. k_d value tick`.
  std::string snapshot() const;

 private:
  Node& descend(std::span<const double> key);
  void split_leaf(Node& leaf);
  void check_key(std::span<const double> key, const char* what) const;
  static std::vector<ScoredCandidate> candidates(const Node& leaf);

  std::size_t dim_;
  TreeConfig config_;
  Rng router_rng_;
  Scorer scorer_;
  std::unique_ptr<Node> root_;
  std::uint64_t clock_ = 0;
  std::uint64_t next_order_ = 0;
  std::size_t count_ = 0;
  std::size_t deferred_splits_ = 0;
  // access tick -> owning leaf; ticks are unique per tree
  std::map<std::uint64_t, Node*> lru_;
};

}  // namespace emt
