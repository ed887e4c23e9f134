#include <gtest/gtest.h>

#include <random>

#include "emt/error.hpp"
#include "emt/scorer.hpp"
#include "oracles.hpp"

namespace emt {
namespace {

using Stored = std::vector<std::pair<std::vector<double>, double>>;

// Candidates view into `mems`, which must outlive the result.
std::vector<ScoredCandidate> leaf_of(const Stored& mems) {
  std::vector<ScoredCandidate> out;
  for (std::size_t i = 0; i < mems.size(); ++i) out.push_back({mems[i].first, mems[i].second, i});
  return out;
}

TEST(FeaturizePair, AbsDiffOfIdenticalKeysIsZero) {
  const std::vector<double> x{3, -1};
  EXPECT_EQ(featurize_pair(PairFeaturizer::AbsDiff, x, x), (std::vector<double>{0, 0}));
}

TEST(FeaturizePair, AbsDiffUnitDifferences) {
  EXPECT_EQ(featurize_pair(PairFeaturizer::AbsDiff, std::vector<double>{1, 0}, std::vector<double>{0, 1}),
            (std::vector<double>{1, 1}));
}

TEST(FeaturizePair, InteractionIsComponentwiseProduct) {
  EXPECT_EQ(featurize_pair(PairFeaturizer::Interaction, std::vector<double>{2, 3}, std::vector<double>{4, -1}),
            (std::vector<double>{8, -3}));
}

TEST(FeaturizePair, DimensionMismatchThrows) {
  EXPECT_THROW(featurize_pair(PairFeaturizer::AbsDiff, std::vector<double>{1}, std::vector<double>{1, 2}),
               InvalidInput);
}

TEST(PredictScore, ExamplesFromHandArithmetic) {
  Scorer s({1, 2}, 0.01, PairFeaturizer::AbsDiff);
  EXPECT_DOUBLE_EQ(s.predict_score(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 3.0);

  Scorer clipped({-1, 3}, 0.01, PairFeaturizer::AbsDiff);
  EXPECT_EQ(clipped.predict_score(std::vector<double>{2, 0}, std::vector<double>{0, 0}), 0.0);
}

TEST(PredictScore, IdenticalKeysScoreZeroForAnyWeights) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(6), x(6), y(6);
    for (auto& v : w) v = normal(gen);
    for (auto& v : x) v = normal(gen);
    for (auto& v : y) v = normal(gen);
    Scorer s(w, 0.01, PairFeaturizer::AbsDiff);
    EXPECT_EQ(s.predict_score(x, x), 0.0);
    EXPECT_GE(s.predict_score(x, y), 0.0);
    Scorer inter(w, 0.01, PairFeaturizer::Interaction);
    EXPECT_GE(inter.predict_score(x, y), 0.0);
  }
}

TEST(Scorer, InitialWeightsAreNonnegativeAndScaledByDim) {
  Rng rng(3);
  Scorer s(8, 0.01, PairFeaturizer::AbsDiff, rng);
  for (double w : s.weights()) {
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, 1.0 / 8);
  }
}

TEST(Scorer, RejectsNonPositiveLearningRate) {
  EXPECT_THROW(Scorer({1.0}, 0.0, PairFeaturizer::AbsDiff), InvalidInput);
}

TEST(BestMatch, ExactKeyWinsScoreTiesThenEarliestInsertion) {
  // Zero weights make every score 0.
  Scorer s({0, 0}, 0.01, PairFeaturizer::AbsDiff);
  const std::vector<double> x{1, 1};
  const std::vector<double> other{5, 5};
  std::vector<ScoredCandidate> leaf{{other, 0.0, 0}, {x, 1.0, 3}, {x, 2.0, 2}};
  EXPECT_EQ(s.best_match(x, leaf), 2u);

  const std::vector<double> nine{9, 9};
  const std::vector<ScoredCandidate> no_exact{{other, 0.0, 4}, {nine, 1.0, 1}};
  EXPECT_EQ(s.best_match(x, no_exact), 1u);
}

TEST(UpdateScorer, SingleMemoryLeavesWeightsUnchanged) {
  Scorer s({1, 1}, 0.1, PairFeaturizer::AbsDiff);
  const Stored mems{{{1, 0}, 1.0}};
  const auto leaf = leaf_of(mems);
  EXPECT_FALSE(s.update(leaf, std::vector<double>{0, 0}, 1.0));
  EXPECT_EQ(std::vector<double>(s.weights().begin(), s.weights().end()), (std::vector<double>{1, 1}));
}

TEST(UpdateScorer, EqualErrorsLeaveWeightsUnchanged) {
  Scorer s({1, 1}, 0.1, PairFeaturizer::AbsDiff);
  const Stored mems{{{1, 0}, 0.0}, {{0, 2}, 1.0}};
  const auto leaf = leaf_of(mems);
  EXPECT_FALSE(s.update(leaf, std::vector<double>{0, 0}, 0.5));
  EXPECT_EQ(std::vector<double>(s.weights().begin(), s.weights().end()), (std::vector<double>{1, 1}));
}

TEST(UpdateScorer, WorkedExampleMatchesFiniteDifferences) {
  // s_b = 1 at (1,0), s_a = 2 at (0,2); best is closer in value, so
  // L = s_b^2 + (1 - s_a)^2 and grad = (2, 4).
  const std::vector<double> x{0, 0};
  const std::vector<double> near{1, 0};
  const std::vector<double> far{0, 2};
  const auto fd = oracle::central_gradient(
      [&](std::span<const double> w) { return oracle::ranking_loss_abs_diff(w, x, near, far); }, {1, 1}, 1e-5);
  EXPECT_NEAR(fd[0], 2.0, 1e-6);
  EXPECT_NEAR(fd[1], 4.0, 1e-6);

  Scorer s({1, 1}, 0.1, PairFeaturizer::AbsDiff);
  const Stored mems{{near, 1.0}, {far, 0.0}};
  const auto leaf = leaf_of(mems);
  EXPECT_TRUE(s.update(leaf, x, 1.0));
  EXPECT_NEAR(s.weights()[0], 0.8, 1e-15);
  EXPECT_NEAR(s.weights()[1], 0.6, 1e-15);
}

TEST(UpdateScorer, GradientMatchesCentralDifferencesAtRandomUnclippedPoints) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const std::size_t d = 2 + gen() % 8;
    std::vector<double> w(d), x(d), near(d), far(d);
    for (auto& v : w) v = unif(gen);
    for (auto& v : x) v = unif(gen);
    for (auto& v : near) v = unif(gen);
    for (auto& v : far) v = unif(gen);
    Scorer s(w, 0.01, PairFeaturizer::AbsDiff);
    if (!(s.predict_score(x, near) > 1e-3 && s.predict_score(x, far) > 1e-3)) continue;

    const auto analytic = s.ranking_loss(x, near, far).gradient;
    const auto fd = oracle::central_gradient(
        [&](std::span<const double> ww) { return oracle::ranking_loss_abs_diff(ww, x, near, far); }, w, 1e-5);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d; ++i) {
      num += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    EXPECT_LE(std::sqrt(num) / std::max(std::sqrt(den), 1e-12), 1e-4);
    ++checked;
  }
}

TEST(UpdateScorer, ClippedSideContributesNoGradient) {
  // far's raw score is negative, so only the near term moves w.
  Scorer s({1, -5}, 0.1, PairFeaturizer::AbsDiff);
  const std::vector<double> x{0, 0}, near{1, 0}, far{0.1, 1};
  const auto g = s.ranking_loss(x, near, far).gradient;
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(UpdateScorer, StepLowersTheRankingLoss) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(5), x(5), b(5), a(5);
    for (std::size_t i = 0; i < 5; ++i) {
      w[i] = unif(gen);
      x[i] = unif(gen);
      b[i] = unif(gen);
      a[i] = unif(gen);
    }
    Scorer s(w, 1e-3, PairFeaturizer::AbsDiff);
    const std::vector<ScoredCandidate> leaf{{b, 1.0, 0}, {a, 0.0, 1}};
    const bool b_best = s.best_match(x, leaf) == 0;
    // y = 1 makes memory b the better predictor.
    const double before = oracle::ranking_loss_abs_diff(w, x, b, a);
    ASSERT_TRUE(s.update(leaf, x, 1.0));
    const double after = oracle::ranking_loss_abs_diff(s.weights(), x, b, a);
    EXPECT_LE(after, before) << "trial " << trial << (b_best ? " (best closer)" : " (alt closer)");
  }
}

TEST(UpdateScorer, BestCloserStepMovesScoresApart) {
  // Pair features of best and alternative on disjoint coordinates, s_a < 1:
  // the step can only lower s_b and raise s_a.
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::uniform_real_distribution<double> small_w(0.05, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(4), x(4);
    for (std::size_t i = 0; i < 4; ++i) {
      w[i] = small_w(gen);
      x[i] = unif(gen);
    }
    std::vector<double> b = x, a = x;
    b[0] += 0.2 * unif(gen);
    b[1] += 0.2 * unif(gen);
    a[2] += unif(gen);
    a[3] += unif(gen);
    Scorer s(w, 1e-3, PairFeaturizer::AbsDiff);
    const double sb0 = s.predict_score(x, b);
    const double sa0 = s.predict_score(x, a);
    ASSERT_LT(sb0, sa0);
    ASSERT_LT(sa0, 1.0);
    const std::vector<ScoredCandidate> leaf{{b, 1.0, 0}, {a, 0.0, 1}};
    ASSERT_TRUE(s.update(leaf, x, 1.0));
    EXPECT_LE(s.predict_score(x, b), sb0);
    EXPECT_GE(s.predict_score(x, a), sa0);
  }
}

TEST(UpdateScorer, Deterministic) {
  const Stored mems{{{0.3, 0.9}, 0.0}, {{0.7, 0.1}, 1.0}, {{0.2, 0.2}, 0.5}};
  const auto leaf = leaf_of(mems);
  Scorer s1({0.4, 0.6}, 0.05, PairFeaturizer::AbsDiff);
  Scorer s2({0.4, 0.6}, 0.05, PairFeaturizer::AbsDiff);
  s1.update(leaf, std::vector<double>{0.5, 0.5}, 1.0);
  s2.update(leaf, std::vector<double>{0.5, 0.5}, 1.0);
  EXPECT_TRUE(std::equal(s1.weights().begin(), s1.weights().end(), s2.weights().begin()));
}

TEST(UpdateScorer, AlternativeTieBreakPrefersEarliestInsertion) {
  // Both non-best memories have |y - y_m| = 0.5; the earlier one (order 1)
  // must be the alternative. With it, the worse-best branch pulls (0,1) in.
  Scorer s({1, 1}, 0.1, PairFeaturizer::AbsDiff);
  const std::vector<double> x{0, 0}, best{0.1, 0}, first{0, 1}, second{1, 0.5};
  const std::vector<ScoredCandidate> leaf{{best, 0.0, 0}, {second, 0.5, 2}, {first, 0.5, 1}};
  Scorer expected({1, 1}, 0.1, PairFeaturizer::AbsDiff);
  const auto g = expected.ranking_loss(x, first, best).gradient;
  ASSERT_TRUE(s.update(leaf, x, 1.0));
  EXPECT_DOUBLE_EQ(s.weights()[0], 1 - 0.1 * g[0]);
  EXPECT_DOUBLE_EQ(s.weights()[1], 1 - 0.1 * g[1]);
}

}  // namespace
}  // namespace emt
