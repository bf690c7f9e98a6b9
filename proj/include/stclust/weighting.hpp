#pragma once

#include "stclust/kde.hpp"
#include "stclust/types.hpp"

namespace stclust {

/// Maximum logistic weight; the curve is centred at one so weights live in
/// the open interval (0, 2).
inline constexpr double kMaxWeight = 2.0;

/// Logistic weight parameters. The midpoint is always the mean density of
/// the dataset being weighted.
struct WeightConfig {
    double steepness = 1.0; // k > 0
};

/// f(d) = 2 / (1 + exp(-k * (d - d_bar))): strictly increasing in d,
/// f(d_bar) = 1, range (0, 2).
double logistic_weight(double density, double mean_density, double steepness);

/// Elementwise logistic_weight over an array of densities.
Array logistic_weights(const Eigen::Ref<const Array>& densities, double mean_density,
                       double steepness);

/// Rescales the spatial distance matrix entrywise:
///   w_ij = s_ij * (f(d_i) + f(d_j)) / 2.
/// Distances between dense-area points stretch, sparse-area ones compress.
Matrix weight_matrix(const Eigen::Ref<const Matrix>& S, const PointDensities& densities,
                     const WeightConfig& cfg);

/// Default steepness k = 1 / std(d_i) (population standard deviation), so a
/// point one standard deviation above mean density gets weight
/// 2/(1+e^-1) ~= 1.462. Throws if the densities are constant.
double default_steepness(const PointDensities& densities);

} // namespace stclust
