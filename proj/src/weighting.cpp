#include "stclust/weighting.hpp"

#include <cmath>

namespace stclust {

double logistic_weight(double density, double mean_density, double steepness) {
    if (!(steepness > 0.0))
        throw std::invalid_argument("logistic_weight: steepness must be positive");
    if (!std::isfinite(density) || !std::isfinite(mean_density))
        throw std::invalid_argument("logistic_weight: non-finite density");
    return kMaxWeight / (1.0 + std::exp(-steepness * (density - mean_density)));
}

Array logistic_weights(const Eigen::Ref<const Array>& densities, double mean_density,
                       double steepness) {
    if (!(steepness > 0.0))
        throw std::invalid_argument("logistic_weights: steepness must be positive");
    return kMaxWeight / (1.0 + (-steepness * (densities - mean_density)).exp());
}

Matrix weight_matrix(const Eigen::Ref<const Matrix>& S, const PointDensities& densities,
                     const WeightConfig& cfg) {
    const Index n = S.rows();
    if (n != S.cols())
        throw std::invalid_argument("weight_matrix: distance matrix must be square");
    if (densities.values.size() != n)
        throw std::invalid_argument("weight_matrix: densities and matrix dimensions differ");
    const Vector f = logistic_weights(densities.values, densities.mean, cfg.steepness).matrix();
    // (f_i + f_j) / 2 is symmetric by construction, so W inherits S's symmetry.
    const Matrix pairwise_factor =
        0.5 * (f.rowwise().replicate(n) + f.transpose().colwise().replicate(n));
    return S.cwiseProduct(pairwise_factor);
}

double default_steepness(const PointDensities& densities) {
    const Index n = densities.values.size();
    if (n < 2) throw std::invalid_argument("default_steepness: need at least 2 densities");
    const double var = (densities.values - densities.values.mean()).square().mean();
    const double sd = std::sqrt(var);
    if (!(sd > 0.0))
        throw std::invalid_argument(
            "default_steepness: densities are constant; pass an explicit steepness");
    return 1.0 / sd;
}

} // namespace stclust
