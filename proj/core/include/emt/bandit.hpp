#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emt/parametric.hpp"
#include "emt/random.hpp"
#include "emt/tree.hpp"

namespace emt {

/// Maps (context, action) to a memory key: [x ; one_hot(a)].
class KeyEncoder {
 public:
  KeyEncoder(std::size_t context_dim, std::size_t actions);

  std::vector<double> encode(std::span<const double> x, std::size_t action) const;
  std::size_t key_dim() const noexcept { return context_dim_ + actions_; }
  std::size_t context_dim() const noexcept { return context_dim_; }
  std::size_t actions() const noexcept { return actions_; }

 private:
  std::size_t context_dim_;
  std::size_t actions_;
};

class EpsilonGreedy {
 public:
  EpsilonGreedy(double epsilon, std::size_t actions, std::uint64_t seed);

  /// Draws the exploration coin; on heads returns a uniform action. Consumes
  /// randomness only when epsilon > 0.
  std::optional<std::size_t> maybe_explore();

  /// Argmax, lowest index on ties.
  static std::size_t greedy(std::span<const double> estimates);

  std::size_t select(std::span<const double> estimates);

  double epsilon() const noexcept { return epsilon_; }
  std::size_t actions() const noexcept { return actions_; }
  std::uint64_t explored() const noexcept { return explored_; }

 private:
  double epsilon_;
  std::size_t actions_;
  Rng rng_;
  std::uint64_t explored_ = 0;
};

/// A contextual-bandit learner under partial feedback.
class CbLearner {
 public:
  virtual ~CbLearner() = default;
  virtual std::size_t predict(std::span<const double> x) = 0;
  virtual void learn(std::span<const double> x, std::size_t action, double reward) = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// EMT-CB: epsilon-greedy over per-action tree recalls; an empty leaf counts
/// as a predicted reward of 0.
class EmtCb final : public CbLearner {
 public:
  EmtCb(std::size_t context_dim, std::size_t actions, TreeConfig tree, double epsilon,
        std::uint64_t seed);

  std::size_t predict(std::span<const double> x) override;
  void learn(std::span<const double> x, std::size_t action, double reward) override;
  std::string_view name() const noexcept override;

  /// Per-action recalled rewards, without the exploration step.
  std::vector<double> estimates(std::span<const double> x);

  const Emt& tree() const noexcept { return tree_; }
  const EpsilonGreedy& policy() const noexcept { return policy_; }

 private:
  KeyEncoder encoder_;
  Emt tree_;
  EpsilonGreedy policy_;
};

/// Epsilon-greedy hashed linear regressor.
class ParametricCb final : public CbLearner {
 public:
  ParametricCb(std::size_t context_dim, std::size_t actions, LinearModelConfig model,
               double epsilon, std::uint64_t seed);

  std::size_t predict(std::span<const double> x) override;
  void learn(std::span<const double> x, std::size_t action, double reward) override;
  std::string_view name() const noexcept override { return "parametric"; }

  LinearModel& model() noexcept { return model_; }
  const EpsilonGreedy& policy() const noexcept { return policy_; }

 private:
  LinearModel model_;
  EpsilonGreedy policy_;
};

/// PEMT-CB: the tree's recalled reward for (x, a) is fed to the linear model
/// as one extra feature. Learn uses the recall cached at decision time, then
/// updates the tree.
class PemtCb final : public CbLearner {
 public:
  PemtCb(std::size_t context_dim, std::size_t actions, TreeConfig tree, LinearModelConfig model,
         double epsilon, std::uint64_t seed);

  std::size_t predict(std::span<const double> x) override;
  void learn(std::span<const double> x, std::size_t action, double reward) override;
  std::string_view name() const noexcept override { return "pemt"; }

  const Emt& tree() const noexcept { return tree_; }
  LinearModel& model() noexcept { return model_; }
  const EpsilonGreedy& policy() const noexcept { return policy_; }

  /// Stacking features from the last predict, if still pending.
  const std::optional<std::vector<double>>& cached_recalls() const noexcept { return cached_; }
  /// learn() calls that found no matching cached prediction and had to
  /// recompute the stacking feature from the current tree.
  std::size_t cache_misses() const noexcept { return cache_misses_; }

 private:
  double recall(std::span<const double> x, std::size_t action);

  KeyEncoder encoder_;
  Emt tree_;
  LinearModel model_;
  EpsilonGreedy policy_;
  std::vector<double> cached_x_;
  std::optional<std::vector<double>> cached_;
  std::size_t cache_misses_ = 0;
};

enum class LearnerKind { Emt, EmtNoSelf, Parametric, Pemt };

std::string_view to_string(LearnerKind kind) noexcept;
/// Accepts emt, emt-noself, parametric, pemt.
std::optional<LearnerKind> parse_learner(std::string_view name) noexcept;
std::string valid_learner_names();

struct LearnerParams {
  double epsilon = 0.1;
  std::size_t leaf_capacity = TreeConfig::kDefaultLeafCapacity;
  double scorer_learning_rate = Scorer::kDefaultLearningRate;
  std::optional<std::size_t> memory_budget;
  unsigned hash_bits = LinearModelConfig::kDefaultHashBits;
  double linear_learning_rate = LinearModelConfig::kDefaultLearningRate;

  void validate() const;
};

/// All learner randomness (exploration, scorer init, Oja starts) derives from
/// `seed` through independent named streams.
std::unique_ptr<CbLearner> make_learner(LearnerKind kind, const LearnerParams& params,
                                        std::size_t context_dim, std::size_t actions,
                                        std::uint64_t seed);

}  // namespace emt
