#include "emt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "emt/error.hpp"
#include "emt/oja.hpp"

namespace emt {

namespace {

double project(std::span<const double> router, std::span<const double> key) {
  double s = 0.0;
  for (std::size_t i = 0; i < router.size(); ++i) s += router[i] * key[i];
  return s;
}

Scorer make_scorer(std::size_t dim, const TreeConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "scorer"));
  return Scorer(dim, cfg.learning_rate, cfg.featurizer, rng);
}

}  // namespace

void TreeConfig::validate() const {
  if (leaf_capacity < 2) throw InvalidInput("leaf capacity must be at least 2");
  if (memory_budget && *memory_budget < 1) throw InvalidInput("memory budget must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("scorer learning rate must be positive and finite");
  }
}

Side route(const Node& internal, std::span<const double> key) {
  if (internal.is_leaf()) throw PreconditionError("route called on a leaf");
  detail::require_same_dim(internal.router.size(), key.size(), "route");
  return project(internal.router, key) <= internal.boundary ? Side::Left : Side::Right;
}

std::optional<double> split_boundary(std::span<const double> projections) {
  if (projections.empty()) return std::nullopt;
  std::vector<double> sorted(projections.begin(), projections.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (hi - lo <= kSplitTieTolerance) return std::nullopt;

  const double median = sorted[(sorted.size() - 1) / 2];
  if (median < hi) return median;
  // The lower median ties with the maximum, so "<=" would empty the right
  // child. Fall back to the largest projection strictly below the maximum.
  const auto first_max = std::lower_bound(sorted.begin(), sorted.end(), hi);
  return *std::prev(first_max);
}

Emt::Emt(std::size_t dim, TreeConfig config)
    : dim_(dim),
      config_((config.validate(), config)),
      router_rng_(derive_seed(config.seed, "oja")),
      scorer_(make_scorer(dim, config)),
      root_(std::make_unique<Node>()) {
  if (dim == 0) throw InvalidInput("key dimension must be positive");
}

void Emt::check_key(std::span<const double> key, const char* what) const {
  detail::require_same_dim(dim_, key.size(), what);
  for (double v : key) {
    if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite key component");
  }
}

Node& Emt::descend(std::span<const double> key) {
  Node* n = root_.get();
  while (!n->is_leaf()) {
    n = project(n->router, key) <= n->boundary ? n->left.get() : n->right.get();
  }
  return *n;
}

const Node& Emt::locate(std::span<const double> key) const {
  detail::require_same_dim(dim_, key.size(), "locate");
  const Node* n = root_.get();
  while (!n->is_leaf()) {
    n = project(n->router, key) <= n->boundary ? n->left.get() : n->right.get();
  }
  return *n;
}

std::size_t Emt::depth_of(std::span<const double> key) const {
  detail::require_same_dim(dim_, key.size(), "depth_of");
  std::size_t depth = 0;
  const Node* n = root_.get();
  while (!n->is_leaf()) {
    n = project(n->router, key) <= n->boundary ? n->left.get() : n->right.get();
    ++depth;
  }
  return depth;
}

std::vector<ScoredCandidate> Emt::candidates(const Node& leaf) {
  std::vector<ScoredCandidate> out;
  out.reserve(leaf.memories.size());
  for (const auto& m : leaf.memories) out.push_back({m.key, m.value, m.order});
  return out;
}

std::optional<Recall> Emt::query(std::span<const double> key) {
  check_key(key, "query");
  const std::uint64_t tick = ++clock_;
  Node& leaf = descend(key);
  if (leaf.memories.empty()) return std::nullopt;

  const auto cands = candidates(leaf);
  Memory& winner = leaf.memories[scorer_.best_match(key, cands)];
  lru_.erase(winner.last_access);
  winner.last_access = tick;
  lru_.emplace(tick, &leaf);
  return Recall{winner.key, winner.value};
}

void Emt::learn(std::span<const double> key, double value) {
  check_key(key, "learn");
  if (!std::isfinite(value)) throw InvalidInput("learn: non-finite value");

  const std::uint64_t tick = ++clock_;
  Node& leaf = descend(key);
  if (leaf.memories.size() >= 2) scorer_.update(candidates(leaf), key, value);

  leaf.memories.push_back(Memory{{key.begin(), key.end()}, value, tick, next_order_++});
  lru_.emplace(tick, &leaf);
  ++count_;

  if (leaf.memories.size() >= config_.leaf_capacity) split_leaf(leaf);

  if (config_.memory_budget) {
    while (count_ > *config_.memory_budget) evict_lru();
  }
}

void Emt::split_leaf(Node& leaf) {
  std::vector<std::span<const double>> keys;
  keys.reserve(leaf.memories.size());
  for (const auto& m : leaf.memories) keys.emplace_back(m.key);

  std::vector<double> router = top_eigen(keys, router_rng_);
  std::vector<double> proj(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) proj[i] = project(router, keys[i]);

  const auto boundary = split_boundary(proj);
  if (!boundary) {
    leaf.deferred = true;
    ++deferred_splits_;
    return;
  }

  auto left = std::make_unique<Node>();
  auto right = std::make_unique<Node>();
  for (std::size_t i = 0; i < leaf.memories.size(); ++i) {
    Node* child = proj[i] <= *boundary ? left.get() : right.get();
    lru_[leaf.memories[i].last_access] = child;
    child->memories.push_back(std::move(leaf.memories[i]));
  }
  leaf.memories.clear();
  leaf.memories.shrink_to_fit();
  leaf.deferred = false;
  leaf.router = std::move(router);
  leaf.boundary = *boundary;
  leaf.left = std::move(left);
  leaf.right = std::move(right);

  // Only possible when a previously deferred (oversized) leaf splits.
  for (Node* child : {leaf.left.get(), leaf.right.get()}) {
    if (child->memories.size() >= config_.leaf_capacity) split_leaf(*child);
  }
}

Memory Emt::evict_lru() {
  if (count_ == 0 || lru_.empty()) throw PreconditionError("evict_lru on an empty tree");
  const auto it = lru_.begin();
  Node& leaf = *it->second;
  const auto pos = std::find_if(leaf.memories.begin(), leaf.memories.end(),
                                [tick = it->first](const Memory& m) { return m.last_access == tick; });
  Memory out = std::move(*pos);
  leaf.memories.erase(pos);
  lru_.erase(it);
  --count_;
  return out;
}

TreeStats Emt::stats() const {
  TreeStats s;
  std::function<void(const Node&, std::size_t)> walk = [&](const Node& n, std::size_t depth) {
    if (n.is_leaf()) {
      ++s.leaves;
      s.max_depth = std::max(s.max_depth, depth);
      s.largest_leaf = std::max(s.largest_leaf, n.memories.size());
      if (n.deferred) {
        ++s.deferred_leaves;
        s.largest_deferred_leaf = std::max(s.largest_deferred_leaf, n.memories.size());
      }
      return;
    }
    ++s.internal_nodes;
    walk(*n.left, depth + 1);
    walk(*n.right, depth + 1);
  };
  walk(*root_, 0);
  return s;
}

std::string Emt::snapshot() const {
  std::ostringstream os;
  os.precision(17);
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.is_leaf()) {
      os << "L " << n.memories.size() << '\n';
      for (const auto& m : n.memories) {
        for (double k : m.key) os << k << ' ';
        os << m.value << ' ' << m.last_access << '\n';
      }
      return;
    }
    os << 'I';
    for (double r : n.router) os << ' ' << r;
    os << ' ' << n.boundary << '\n';
    walk(*n.left);
    walk(*n.right);
  };
  walk(*root_);
  return os.str();
}

}  // namespace emt
