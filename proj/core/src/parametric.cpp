#include "emt/parametric.hpp"

#include <cmath>
#include <string>

#include "emt/error.hpp"
#include "emt/random.hpp"

namespace emt {

void LinearModelConfig::validate() const {
  if (hash_bits < 1 || hash_bits > 30) throw InvalidInput("hash bits must lie in [1, 30]");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("linear learning rate must be positive and finite");
  }
}

LinearModel::LinearModel(std::size_t context_dim, std::size_t actions, LinearModelConfig config)
    : context_dim_(context_dim),
      actions_(actions),
      config_((config.validate(), config)),
      mask_((std::uint64_t{1} << config.hash_bits) - 1),
      weights_(std::size_t{1} << config.hash_bits, 0.0),
      grad_sq_(weights_.size(), 0.0) {
  if (actions < 2) throw InvalidInput("a bandit needs at least two actions");
}

std::size_t LinearModel::slot(std::size_t action, std::uint64_t feature) const noexcept {
  return static_cast<std::size_t>(mix64(mix64(action + 1) ^ feature) & mask_);
}

std::uint64_t LinearModel::quadratic_feature(std::size_t i, std::size_t j) const noexcept {
  if (i > j) std::swap(i, j);
  const std::uint64_t d = context_dim_;
  const std::uint64_t row = i * d - (i * (i + 1)) / 2 + i;  // sum_{r<i} (d - r)
  return 1 + d + row + (j - i);
}

std::size_t LinearModel::feature_count(bool with_stack) const noexcept {
  const std::size_t d = context_dim_;
  return 1 + d + d * (d + 1) / 2 + (with_stack ? 1 : 0);
}

void LinearModel::check(std::span<const double> x, std::size_t action) const {
  detail::require_same_dim(context_dim_, x.size(), "LinearModel");
  if (action >= actions_) {
    throw InvalidInput("action " + std::to_string(action) + " out of range [0, " +
                       std::to_string(actions_) + ")");
  }
}

std::vector<LinearModel::Feature> LinearModel::features(std::span<const double> x,
                                                         std::size_t action,
                                                         std::optional<double> stack) const {
  check(x, action);
  std::vector<Feature> out;
  out.reserve(feature_count(stack.has_value()));
  out.push_back({slot(action, kBiasFeature), 1.0});
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back({slot(action, linear_feature(i)), x[i]});
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i; j < x.size(); ++j) {
      out.push_back({slot(action, quadratic_feature(i, j)), x[i] * x[j]});
    }
  }
  if (stack) out.push_back({slot(action, kStackingFeature), *stack});
  return out;
}

double LinearModel::predict(std::span<const double> x, std::size_t action,
                            std::optional<double> stack) const {
  double s = 0.0;
  for (const auto& f : features(x, action, stack)) s += weights_[f.slot] * f.value;
  return s;
}

void LinearModel::learn(std::span<const double> x, std::size_t action, double y,
                        std::optional<double> stack) {
  if (!std::isfinite(y)) throw InvalidInput("LinearModel::learn: non-finite target");
  const auto feats = features(x, action, stack);
  double pred = 0.0;
  for (const auto& f : feats) pred += weights_[f.slot] * f.value;
  const double residual = 2.0 * (pred - y);
  if (residual == 0.0) return;
  for (const auto& f : feats) {
    const double g = residual * f.value;
    if (g == 0.0) continue;
    grad_sq_[f.slot] += g * g;
    weights_[f.slot] -= config_.learning_rate / std::sqrt(grad_sq_[f.slot]) * g;
  }
}

}  // namespace emt
