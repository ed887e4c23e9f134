#include "emt/scorer.hpp"

#include <algorithm>
#include <cmath>

#include "emt/error.hpp"

namespace emt {

const char* to_string(PairFeaturizer f) noexcept {
  switch (f) {
    case PairFeaturizer::AbsDiff:
      return "abs_diff";
    case PairFeaturizer::Interaction:
      return "interaction";
  }
  return "?";
}

std::vector<double> featurize_pair(PairFeaturizer variant, std::span<const double> a,
                                   std::span<const double> b) {
  detail::require_same_dim(a.size(), b.size(), "featurize_pair");
  std::vector<double> z(a.size());
  if (variant == PairFeaturizer::AbsDiff) {
    std::transform(a.begin(), a.end(), b.begin(), z.begin(),
                   [](double u, double v) { return std::abs(u - v); });
  } else {
    std::transform(a.begin(), a.end(), b.begin(), z.begin(),
                   [](double u, double v) { return u * v; });
  }
  return z;
}

namespace {

bool same_key(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Scorer::Scorer(std::size_t dim, double learning_rate, PairFeaturizer variant, Rng& rng)
    : w_(dim), eta_(learning_rate), variant_(variant) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("scorer learning rate must be positive and finite");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scale = dim > 0 ? 1.0 / static_cast<double>(dim) : 0.0;
  for (auto& x : w_) x = unif(rng) * scale;
}

Scorer::Scorer(std::vector<double> weights, double learning_rate, PairFeaturizer variant)
    : w_(std::move(weights)), eta_(learning_rate), variant_(variant) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("scorer learning rate must be positive and finite");
  }
}

void Scorer::set_weights(std::vector<double> w) {
  detail::require_same_dim(w_.size(), w.size(), "Scorer::set_weights");
  w_ = std::move(w);
}

double Scorer::raw_score(std::span<const double> z) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += w_[i] * z[i];
  return s;
}

double Scorer::predict_score(std::span<const double> a, std::span<const double> b) const {
  detail::require_same_dim(w_.size(), a.size(), "predict_score");
  return std::max(0.0, raw_score(featurize_pair(variant_, a, b)));
}

std::size_t Scorer::best_match(std::span<const double> x,
                               std::span<const ScoredCandidate> candidates) const {
  std::size_t best = 0;
  double best_score = predict_score(x, candidates[0].key);
  bool best_exact = same_key(x, candidates[0].key);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const double s = predict_score(x, c.key);
    if (s > best_score) continue;
    const bool exact = same_key(x, c.key);
    if (s < best_score || (exact && !best_exact) ||
        (exact == best_exact && c.order < candidates[best].order)) {
      best = i;
      best_score = s;
      best_exact = exact;
    }
  }
  return best;
}

Scorer::LossGradient Scorer::ranking_loss(std::span<const double> x,
                                          std::span<const double> near,
                                          std::span<const double> far) const {
  const auto z_near = featurize_pair(variant_, near, x);
  const auto z_far = featurize_pair(variant_, far, x);
  const double raw_near = raw_score(z_near);
  const double raw_far = raw_score(z_far);
  const double s_near = std::max(0.0, raw_near);
  const double s_far = std::max(0.0, raw_far);

  LossGradient out{s_near * s_near + (1.0 - s_far) * (1.0 - s_far),
                   std::vector<double>(w_.size(), 0.0)};
  // The clip contributes zero gradient wherever the raw score is <= 0.
  if (raw_near > 0.0) {
    for (std::size_t i = 0; i < w_.size(); ++i) out.gradient[i] += 2.0 * s_near * z_near[i];
  }
  if (raw_far > 0.0) {
    for (std::size_t i = 0; i < w_.size(); ++i) out.gradient[i] -= 2.0 * (1.0 - s_far) * z_far[i];
  }
  return out;
}

bool Scorer::update(std::span<const ScoredCandidate> leaf, std::span<const double> x, double y) {
  if (leaf.size() < 2) return false;
  detail::require_same_dim(w_.size(), x.size(), "Scorer::update");

  const std::size_t b = best_match(x, leaf);
  std::size_t a = leaf.size();
  double a_err = 0.0;
  for (std::size_t i = 0; i < leaf.size(); ++i) {
    if (i == b) continue;
    const double err = std::abs(y - leaf[i].value);
    if (a == leaf.size() || err < a_err || (err == a_err && leaf[i].order < leaf[a].order)) {
      a = i;
      a_err = err;
    }
  }
  const double b_err = std::abs(y - leaf[b].value);
  if (b_err == a_err) return false;

  const auto& near = b_err < a_err ? leaf[b] : leaf[a];
  const auto& far = b_err < a_err ? leaf[a] : leaf[b];
  const auto step = ranking_loss(x, near.key, far.key);
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= eta_ * step.gradient[i];
  return true;
}

}  // namespace emt
