#include "emt/oja.hpp"

#include <cmath>

#include "emt/error.hpp"

namespace emt {

std::vector<double> top_eigen(std::span<const std::span<const double>> keys, Rng& rng) {
  if (keys.size() < 2) throw PreconditionError("top_eigen needs at least two keys");
  const std::size_t d = keys.front().size();
  for (const auto& k : keys) detail::require_same_dim(d, k.size(), "top_eigen");

  std::vector<double> mean(d, 0.0);
  for (const auto& k : keys) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += k[i];
  }
  for (auto& m : mean) m /= static_cast<double>(keys.size());

  std::vector<double> v = random_unit_vector(d, rng);
  std::vector<double> x(d);
  for (std::size_t n = 0; n < keys.size(); ++n) {
    double proj = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = keys[n][i] - mean[i];
      proj += x[i] * v[i];
    }
    const double step = proj / static_cast<double>(n + 1);
    std::vector<double> next(v);
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      next[i] += step * x[i];
      norm += next[i] * next[i];
    }
    norm = std::sqrt(norm);
    // v + (1/n) x x^T v cannot vanish for step >= -1, but guard the divide.
    if (!(norm > 0.0) || !std::isfinite(norm)) continue;
    for (std::size_t i = 0; i < d; ++i) v[i] = next[i] / norm;
  }
  return v;
}

}  // namespace emt
