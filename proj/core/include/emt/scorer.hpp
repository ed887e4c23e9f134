#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emt/random.hpp"

namespace emt {

/// How a pair of keys is turned into scorer input.
///  - AbsDiff:     z_i = |a_i - b_i|  (z = 0 for identical keys)
///  - Interaction: z_i = a_i * b_i    (no self-consistency guarantee)
enum class PairFeaturizer { AbsDiff, Interaction };

const char* to_string(PairFeaturizer f) noexcept;

std::vector<double> featurize_pair(PairFeaturizer variant, std::span<const double> a,
                                   std::span<const double> b);

/// A stored (key, value) pair as seen by the scorer. `order` is the
/// insertion sequence number used to break ties.
struct ScoredCandidate {
  std::span<const double> key;
  double value;
  std::uint64_t order;
};

/// Global learned dissimilarity over key pairs: max(0, <w, z(a, b)>), trained
/// online with a pairwise ranking loss that pushes the better-predicting
/// memory toward 0 and the worse one toward 1.
class Scorer {
 public:
  static constexpr double kDefaultLearningRate = 0.01;

  /// Weights drawn uniform on [0, 1) / d.
  Scorer(std::size_t dim, double learning_rate, PairFeaturizer variant, Rng& rng);
  Scorer(std::vector<double> weights, double learning_rate, PairFeaturizer variant);

  double predict_score(std::span<const double> a, std::span<const double> b) const;

  /// Index of the candidate minimizing predict_score(x, candidate.key).
  /// Ties: exact key match first, then smallest insertion order.
  /// `candidates` must be nonempty.
  std::size_t best_match(std::span<const double> x,
                         std::span<const ScoredCandidate> candidates) const;

  /// One ranking-loss step for the new observation (x, y) against the
  /// memories of the leaf it is about to be inserted into. No-op for fewer
  /// than two candidates or when best and alternative are equally good.
  /// Returns true when the weights changed.
  bool update(std::span<const ScoredCandidate> leaf, std::span<const double> x, double y);

  /// Loss and gradient of the ranking objective for an explicit
  /// (near, far) assignment: L = s(near)^2 + (1 - s(far))^2.
  struct LossGradient {
    double loss;
    std::vector<double> gradient;
  };
  LossGradient ranking_loss(std::span<const double> x, std::span<const double> near,
                            std::span<const double> far) const;

  std::span<const double> weights() const noexcept { return w_; }
  void set_weights(std::vector<double> w);
  double learning_rate() const noexcept { return eta_; }
  PairFeaturizer variant() const noexcept { return variant_; }
  std::size_t dim() const noexcept { return w_.size(); }

 private:
  double raw_score(std::span<const double> z) const noexcept;

  std::vector<double> w_;
  double eta_;
  PairFeaturizer variant_;
};

}  // namespace emt
