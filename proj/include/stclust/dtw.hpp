#pragma once

#include <vector>

#include "stclust/types.hpp"

namespace stclust {

/// Dynamic time warping dissimilarity between two univariate series.
///
/// Unconstrained DTW with squared local cost (a_i - b_j)^2, steps
/// {(1,0), (0,1), (1,1)} and endpoints aligned, returning the square root of
/// the minimal cumulative cost. No window constraint and no normalization by
/// path length, so thresholds are in the units of this convention. The
/// diagonal path makes dtw_distance <= lock-step Euclidean for equal-length
/// series. Not a metric: the triangle inequality may fail.
double dtw_distance(const Eigen::Ref<const Array>& a, const Eigen::Ref<const Array>& b);

/// Pairwise DTW matrix over equal-length series. Throws, naming the index,
/// when a series length differs from the first one.
Matrix pairwise_temporal(const std::vector<Array>& series);

/// Rows of an n x T matrix treated as n series of length T.
Matrix pairwise_temporal(const Eigen::Ref<const Matrix>& series);

/// (x - mean) / std per series; a constant series maps to all zeros.
Array znormalize(const Eigen::Ref<const Array>& series);

} // namespace stclust
