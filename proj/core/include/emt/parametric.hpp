#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace emt {

struct LinearModelConfig {
  static constexpr unsigned kDefaultHashBits = 18;
  static constexpr double kDefaultLearningRate = 0.5;

  unsigned hash_bits = kDefaultHashBits;
  double learning_rate = kDefaultLearningRate;

  void validate() const;
};

/// Hashed linear reward regressor over per-action {bias, x_i, x_i x_j (i<=j)}
/// features, optionally extended by one stacking feature. Trained with
/// per-weight adaptive SGD on squared loss: each weight steps by
/// lr / sqrt(sum of its squared gradients).
class LinearModel {
 public:
  /// Feature ids; quadratic ids follow the linear block.
  static constexpr std::uint64_t kBiasFeature = 0;
  static constexpr std::uint64_t kStackingFeature = ~std::uint64_t{0};

  struct Feature {
    std::size_t slot;
    double value;
  };

  LinearModel(std::size_t context_dim, std::size_t actions, LinearModelConfig config = {});

  /// Without `stack`, only the base features are active.
  double predict(std::span<const double> x, std::size_t action,
                 std::optional<double> stack = std::nullopt) const;
  void learn(std::span<const double> x, std::size_t action, double y,
             std::optional<double> stack = std::nullopt);

  std::vector<Feature> features(std::span<const double> x, std::size_t action,
                                std::optional<double> stack) const;
  std::size_t feature_count(bool with_stack) const noexcept;

  std::size_t slot(std::size_t action, std::uint64_t feature) const noexcept;
  std::uint64_t linear_feature(std::size_t i) const noexcept { return 1 + i; }
  std::uint64_t quadratic_feature(std::size_t i, std::size_t j) const noexcept;

  double weight(std::size_t slot) const { return weights_.at(slot); }
  void set_weight(std::size_t slot, double w) { weights_.at(slot) = w; }
  std::size_t table_size() const noexcept { return weights_.size(); }
  std::size_t context_dim() const noexcept { return context_dim_; }
  std::size_t actions() const noexcept { return actions_; }
  const LinearModelConfig& config() const noexcept { return config_; }

 private:
  void check(std::span<const double> x, std::size_t action) const;

  std::size_t context_dim_;
  std::size_t actions_;
  LinearModelConfig config_;
  std::uint64_t mask_;
  std::vector<double> weights_;
  std::vector<double> grad_sq_;
};

}  // namespace emt
