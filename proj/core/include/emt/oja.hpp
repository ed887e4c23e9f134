#pragma once

#include <span>
#include <vector>

#include "emt/random.hpp"

namespace emt {

/// Approximate top principal direction of a set of keys: mean-center, draw a
/// random unit start vector, then one Oja pass in the given order,
///   v <- normalize(v + (1/n) x_n x_n^T v),  n = 1..N.
///
/// When every key is identical (nothing to center on) the random start vector
/// is returned unchanged; callers detect that through the projections.
/// Requires at least two keys of equal dimension.
std::vector<double> top_eigen(std::span<const std::span<const double>> keys, Rng& rng);

}  // namespace emt
