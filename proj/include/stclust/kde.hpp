#pragma once

#include "stclust/types.hpp"

namespace stclust {

/// Gaussian kernel density estimate over a 2-D sample.
///
/// The estimate is fitted in z-scored coordinates: inputs are standardized
/// per dimension with the stored mean/std before evaluation, and the
/// returned values are densities with respect to the standardized plane
/// (they integrate to one there). The kernel is the fully normalized
/// Gaussian (2*pi*h^2)^(-d/2) * exp(-r^2 / (2 h^2)), so
///   f(y) = (1/n) * sum_i K_h(x_i - y).
struct DensityField {
    Points sample;                 // z-scored sample, one row per point
    double bandwidth = 0.0;        // h, in standardized units
    Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
    Eigen::RowVector2d std = Eigen::RowVector2d::Ones();

    static constexpr int dims = 2;
};

/// Per-point densities of the fitted sample plus their mean.
struct PointDensities {
    Array values;       // d_i, one per fitted point
    double mean = 0.0;  // d-bar
};

/// Scott's rule bandwidth n^(-1/(p+4)), for standardized coordinates.
/// Requires n >= 2 and p >= 1.
double scott_bandwidth(Index n, int p);

/// Fits a DensityField to raw 2-D locations: z-scores each dimension
/// (population standard deviation) and applies Scott's rule. Throws if a
/// dimension is constant.
DensityField fit_density(const Eigen::Ref<const Points>& points);

/// Builds a field directly from an already-standardized sample and an
/// explicit bandwidth (identity standardization).
DensityField make_density_field(const Eigen::Ref<const Points>& standardized_sample, double bandwidth);

/// Density at a raw location (z-scored with the field's parameters first).
double density_at(const DensityField& field, double x, double y);

/// Leave-self-in densities at every fitted sample point, in fit order.
PointDensities point_densities(const DensityField& field);

/// Rectangular evaluation grid in raw coordinates.
struct DensityGrid {
    Array xs;       // nx grid coordinates, ascending
    Array ys;       // ny grid coordinates, ascending
    Matrix values;  // ny x nx, values(iy, ix) = density at (xs[ix], ys[iy])
};

/// Evaluates the field on a resolution.x() x resolution.y() grid spanning
/// [xmin, xmax] x [ymin, ymax] in raw coordinates. Resolution >= 2 per
/// dimension; bbox must not be inverted.
DensityGrid density_grid(const DensityField& field, double xmin, double xmax,
                         double ymin, double ymax, Index nx, Index ny);

} // namespace stclust
