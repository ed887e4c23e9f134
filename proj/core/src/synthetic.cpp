#include "emt/synthetic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "emt/error.hpp"
#include "emt/random.hpp"

namespace emt::synthetic {

namespace {

SupervisedDataset shell(std::size_t dim, std::size_t actions) {
  if (actions < 2) throw InvalidInput("synthetic data needs at least two classes");
  SupervisedDataset ds;
  ds.classes = actions;
  for (std::size_t i = 0; i < dim; ++i) ds.feature_names.push_back("x" + std::to_string(i));
  for (std::size_t a = 0; a < actions; ++a) ds.class_names.push_back("a" + std::to_string(a));
  return ds;
}

}  // namespace

SupervisedDataset recurring_contexts(std::size_t contexts, std::size_t dim, std::size_t actions,
                                     std::size_t rows, std::uint64_t seed) {
  if (contexts < 1) throw InvalidInput("need at least one context");
  auto ds = shell(dim, actions);
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_label(0, actions - 1);
  std::uniform_int_distribution<std::size_t> pick_context(0, contexts - 1);

  std::vector<std::vector<double>> pool(contexts, std::vector<double>(dim));
  std::vector<std::size_t> labels(contexts);
  for (std::size_t c = 0; c < contexts; ++c) {
    for (auto& v : pool[c]) v = unif(rng);
    labels[c] = pick_label(rng);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = pick_context(rng);
    ds.features.push_back(pool[c]);
    ds.labels.push_back(labels[c]);
  }
  return ds;
}

SupervisedDataset linear_classes(std::size_t dim, std::size_t actions, std::size_t rows,
                                 std::uint64_t seed) {
  auto ds = shell(dim, actions);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> w(actions, std::vector<double>(dim));
  std::vector<double> b(actions);
  for (std::size_t a = 0; a < actions; ++a) {
    double offset = 0.0;
    for (auto& v : w[a]) {
      v = normal(rng);
      offset += 0.5 * v;
    }
    // Center each score on the cube's midpoint so every class is reachable.
    b[a] = -offset;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> x(dim);
    for (auto& v : x) v = unif(rng);
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t a = 0; a < actions; ++a) {
      double s = b[a];
      for (std::size_t i = 0; i < dim; ++i) s += w[a][i] * x[i];
      if (s > best_score) {
        best_score = s;
        best = a;
      }
    }
    ds.features.push_back(std::move(x));
    ds.labels.push_back(best);
  }
  return ds;
}

SupervisedDataset gaussian(std::span<const double> variances, std::size_t rows, bool rotate,
                           std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(variances.size());
  auto ds = shell(variances.size(), 2);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
  if (rotate) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
    }
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  }
  Eigen::VectorXd z(d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng) * std::sqrt(variances[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd x = q * z;
    ds.features.emplace_back(x.data(), x.data() + d);
    ds.labels.push_back(r % 2);
  }
  return ds;
}

}  // namespace emt::synthetic
