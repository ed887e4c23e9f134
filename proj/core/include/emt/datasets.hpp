#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emt {

struct SupervisedDataset {
  std::vector<std::vector<double>> features;  // one row per sample, all length dim()
  std::vector<std::size_t> labels;            // in [0, classes)
  std::size_t classes = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;  // index = label, in order of first appearance
  std::size_t imputed_cells = 0;         // empty numeric cells zero-filled at load

  std::size_t rows() const noexcept { return features.size(); }
  std::size_t dim() const noexcept { return feature_names.size(); }

  /// Throws InvalidInput unless rows share a dimension, labels are in range
  /// and there are at least two classes.
  void validate() const;
};

/// Label column chosen by header name or zero-based index; neither selects
/// the last column.
struct LabelColumn {
  std::optional<std::string> name;
  std::optional<std::size_t> index;

  static LabelColumn by_name(std::string n) { return {std::move(n), std::nullopt}; }
  static LabelColumn by_index(std::size_t i) { return {std::nullopt, i}; }
  /// Digits select an index, anything else a name.
  static LabelColumn parse(const std::string& spec);
};

/// Comma-separated values with optional double-quoted fields. Columns whose
/// nonempty cells all parse as numbers become real features (empty cells ->
/// 0); any other column is one-hot encoded over its observed values.
SupervisedDataset load_csv(const std::filesystem::path& path, const LabelColumn& label,
                           bool has_header);
SupervisedDataset parse_csv(std::istream& in, const LabelColumn& label, bool has_header,
                            const std::string& source = "<stream>");

void write_csv(std::ostream& out, const SupervisedDataset& ds);

/// x_i -> (x_i - min_i) * factor_i with factor_i = 1 / (max_i - min_i), or 0
/// for a constant feature.
struct ScalingTransform {
  std::vector<double> min;
  std::vector<double> factor;
};

ScalingTransform fit_scaling(const SupervisedDataset& ds);
SupervisedDataset apply_scaling(SupervisedDataset ds, const ScalingTransform& t);

/// Seeded uniform sample of n rows without replacement, in shuffled order;
/// a full shuffle when n >= rows.
SupervisedDataset subsample(const SupervisedDataset& ds, std::size_t n, std::uint64_t seed);

/// Supervised-to-bandit view: each row is one round, the actions are the
/// class labels and only the indicator 1[a == label] is revealed.
class BanditEnv {
 public:
  struct Round {
    std::span<const double> context;
    std::size_t label;

    double reward(std::size_t action) const noexcept { return action == label ? 1.0 : 0.0; }
  };

  explicit BanditEnv(SupervisedDataset ds);

  /// Next round, or nothing once the stream is exhausted.
  std::optional<Round> step();

  std::size_t length() const noexcept { return ds_.rows(); }
  std::size_t remaining() const noexcept { return ds_.rows() - cursor_; }
  std::size_t actions() const noexcept { return ds_.classes; }
  std::size_t context_dim() const noexcept { return ds_.dim(); }

 private:
  SupervisedDataset ds_;
  std::size_t cursor_ = 0;
};

struct ExplainedVariance {
  double ratio = 0.0;          // lambda_1 / sum(lambda)
  bool zero_variance = false;  // total variance was 0; ratio reported as 0
};

/// Share of feature covariance captured by its top eigenvector, from an exact
/// symmetric eigendecomposition. Needs at least two rows.
ExplainedVariance top_eigen_explained_variance(const SupervisedDataset& ds);

}  // namespace emt
