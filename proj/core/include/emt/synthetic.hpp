#pragma once

#include <cstdint>
#include <span>

#include "emt/datasets.hpp"

namespace emt::synthetic {

/// Rows drawn from a fixed pool of `contexts` random points in [0,1]^dim,
/// each with its own fixed random label: exact repeats, no smooth structure.
SupervisedDataset recurring_contexts(std::size_t contexts, std::size_t dim, std::size_t actions,
                                     std::size_t rows, std::uint64_t seed);

/// Uniform [0,1]^dim contexts labelled by argmax_a <W_a, x> + b_a for a random
/// affine score per class.
SupervisedDataset linear_classes(std::size_t dim, std::size_t actions, std::size_t rows,
                                 std::uint64_t seed);

/// Zero-mean Gaussian rows with covariance Q diag(variances) Q^T, where Q is a
/// random rotation when `rotate` is set and the identity otherwise. Labels
/// alternate between two classes.
SupervisedDataset gaussian(std::span<const double> variances, std::size_t rows, bool rotate,
                           std::uint64_t seed);

}  // namespace emt::synthetic
