#include "emt/bandit.hpp"

#include <algorithm>
#include <cmath>

#include "emt/error.hpp"

namespace emt {

KeyEncoder::KeyEncoder(std::size_t context_dim, std::size_t actions)
    : context_dim_(context_dim), actions_(actions) {
  if (actions < 2) throw InvalidInput("a bandit needs at least two actions");
}

std::vector<double> KeyEncoder::encode(std::span<const double> x, std::size_t action) const {
  detail::require_same_dim(context_dim_, x.size(), "encode");
  if (action >= actions_) {
    throw InvalidInput("action " + std::to_string(action) + " out of range [0, " +
                       std::to_string(actions_) + ")");
  }
  std::vector<double> key(key_dim(), 0.0);
  std::copy(x.begin(), x.end(), key.begin());
  key[context_dim_ + action] = 1.0;
  return key;
}

EpsilonGreedy::EpsilonGreedy(double epsilon, std::size_t actions, std::uint64_t seed)
    : epsilon_(epsilon), actions_(actions), rng_(seed) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
  if (actions < 2) throw InvalidInput("a bandit needs at least two actions");
}

std::optional<std::size_t> EpsilonGreedy::maybe_explore() {
  if (epsilon_ <= 0.0) return std::nullopt;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (!(coin(rng_) < epsilon_)) return std::nullopt;
  ++explored_;
  std::uniform_int_distribution<std::size_t> pick(0, actions_ - 1);
  return pick(rng_);
}

std::size_t EpsilonGreedy::greedy(std::span<const double> estimates) {
  // max_element keeps the first maximum.
  return static_cast<std::size_t>(
      std::distance(estimates.begin(), std::max_element(estimates.begin(), estimates.end())));
}

std::size_t EpsilonGreedy::select(std::span<const double> estimates) {
  detail::require_same_dim(actions_, estimates.size(), "EpsilonGreedy::select");
  if (auto a = maybe_explore()) return *a;
  return greedy(estimates);
}

// --- EMT-CB -----------------------------------------------------------------

namespace {

TreeConfig seeded(TreeConfig cfg, std::uint64_t seed) {
  cfg.seed = derive_seed(seed, "tree");
  return cfg;
}

}  // namespace

EmtCb::EmtCb(std::size_t context_dim, std::size_t actions, TreeConfig tree, double epsilon,
             std::uint64_t seed)
    : encoder_(context_dim, actions),
      tree_(encoder_.key_dim(), seeded(tree, seed)),
      policy_(epsilon, actions, derive_seed(seed, "explore")) {}

std::string_view EmtCb::name() const noexcept {
  return tree_.config().featurizer == PairFeaturizer::AbsDiff ? "emt" : "emt-noself";
}

std::vector<double> EmtCb::estimates(std::span<const double> x) {
  std::vector<double> est(encoder_.actions(), 0.0);
  for (std::size_t a = 0; a < est.size(); ++a) {
    if (auto r = tree_.query(encoder_.encode(x, a))) est[a] = r->value;
  }
  return est;
}

std::size_t EmtCb::predict(std::span<const double> x) {
  detail::require_same_dim(encoder_.context_dim(), x.size(), "EmtCb::predict");
  if (auto a = policy_.maybe_explore()) return *a;
  return EpsilonGreedy::greedy(estimates(x));
}

void EmtCb::learn(std::span<const double> x, std::size_t action, double reward) {
  tree_.learn(encoder_.encode(x, action), reward);
}

// --- Parametric -------------------------------------------------------------

ParametricCb::ParametricCb(std::size_t context_dim, std::size_t actions, LinearModelConfig model,
                           double epsilon, std::uint64_t seed)
    : model_(context_dim, actions, model), policy_(epsilon, actions, derive_seed(seed, "explore")) {}

std::size_t ParametricCb::predict(std::span<const double> x) {
  std::vector<double> est(model_.actions());
  for (std::size_t a = 0; a < est.size(); ++a) est[a] = model_.predict(x, a);
  return policy_.select(est);
}

void ParametricCb::learn(std::span<const double> x, std::size_t action, double reward) {
  model_.learn(x, action, reward);
}

// --- PEMT-CB ----------------------------------------------------------------

PemtCb::PemtCb(std::size_t context_dim, std::size_t actions, TreeConfig tree,
               LinearModelConfig model, double epsilon, std::uint64_t seed)
    : encoder_(context_dim, actions),
      tree_(encoder_.key_dim(), seeded(tree, seed)),
      model_(context_dim, actions, model),
      policy_(epsilon, actions, derive_seed(seed, "explore")) {}

double PemtCb::recall(std::span<const double> x, std::size_t action) {
  const auto r = tree_.query(encoder_.encode(x, action));
  return r ? r->value : 0.0;
}

std::size_t PemtCb::predict(std::span<const double> x) {
  detail::require_same_dim(encoder_.context_dim(), x.size(), "PemtCb::predict");
  std::vector<double> recalls(encoder_.actions());
  std::vector<double> est(encoder_.actions());
  for (std::size_t a = 0; a < est.size(); ++a) {
    recalls[a] = recall(x, a);
    est[a] = model_.predict(x, a, recalls[a]);
  }
  cached_x_.assign(x.begin(), x.end());
  cached_ = std::move(recalls);
  return policy_.select(est);
}

void PemtCb::learn(std::span<const double> x, std::size_t action, double reward) {
  if (action >= encoder_.actions()) throw InvalidInput("PemtCb::learn: action out of range");
  double stack = 0.0;
  if (cached_ && std::equal(x.begin(), x.end(), cached_x_.begin(), cached_x_.end())) {
    stack = (*cached_)[action];
  } else {
    ++cache_misses_;
    stack = recall(x, action);
  }
  cached_.reset();
  model_.learn(x, action, reward, stack);
  tree_.learn(encoder_.encode(x, action), reward);
}

// --- factory ----------------------------------------------------------------

std::string_view to_string(LearnerKind kind) noexcept {
  switch (kind) {
    case LearnerKind::Emt:
      return "emt";
    case LearnerKind::EmtNoSelf:
      return "emt-noself";
    case LearnerKind::Parametric:
      return "parametric";
    case LearnerKind::Pemt:
      return "pemt";
  }
  return "?";
}

std::optional<LearnerKind> parse_learner(std::string_view name) noexcept {
  for (auto k : {LearnerKind::Emt, LearnerKind::EmtNoSelf, LearnerKind::Parametric,
                 LearnerKind::Pemt}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string valid_learner_names() { return "emt, emt-noself, parametric, pemt"; }

void LearnerParams::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in [0, 1]");
  TreeConfig{leaf_capacity, memory_budget, 0, scorer_learning_rate}.validate();
  LinearModelConfig{hash_bits, linear_learning_rate}.validate();
}

std::unique_ptr<CbLearner> make_learner(LearnerKind kind, const LearnerParams& p,
                                        std::size_t context_dim, std::size_t actions,
                                        std::uint64_t seed) {
  p.validate();
  TreeConfig tree{p.leaf_capacity, p.memory_budget, 0, p.scorer_learning_rate,
                  kind == LearnerKind::EmtNoSelf ? PairFeaturizer::Interaction
                                                 : PairFeaturizer::AbsDiff};
  const LinearModelConfig model{p.hash_bits, p.linear_learning_rate};
  switch (kind) {
    case LearnerKind::Emt:
    case LearnerKind::EmtNoSelf:
      return std::make_unique<EmtCb>(context_dim, actions, tree, p.epsilon, seed);
    case LearnerKind::Parametric:
      return std::make_unique<ParametricCb>(context_dim, actions, model, p.epsilon, seed);
    case LearnerKind::Pemt:
      return std::make_unique<PemtCb>(context_dim, actions, tree, model, p.epsilon, seed);
  }
  throw InvalidInput("unknown learner kind");
}

}  // namespace emt
