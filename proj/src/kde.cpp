#include "stclust/kde.hpp"

#include <cmath>
#include <numbers>

namespace stclust {

double scott_bandwidth(Index n, int p) {
    if (n < 2) throw std::invalid_argument("scott_bandwidth: need at least 2 points");
    if (p < 1) throw std::invalid_argument("scott_bandwidth: dimension count must be >= 1");
    return std::pow(static_cast<double>(n), -1.0 / (p + 4));
}

DensityField fit_density(const Eigen::Ref<const Points>& points) {
    const Index n = points.rows();
    if (n < 2) throw std::invalid_argument("fit_density: need at least 2 points");
    if (!points.allFinite()) throw std::invalid_argument("fit_density: non-finite coordinates");

    DensityField field;
    field.mean = points.colwise().mean();
    Points centered = points.rowwise() - field.mean;
    field.std = (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt();
    for (int d = 0; d < DensityField::dims; ++d) {
        if (field.std(d) <= 0.0)
            throw std::invalid_argument("fit_density: dimension " + std::to_string(d) +
                                        " is constant (zero standard deviation)");
    }
    field.sample = centered.array().rowwise() / field.std.array();
    field.bandwidth = scott_bandwidth(n, DensityField::dims);
    return field;
}

DensityField make_density_field(const Eigen::Ref<const Points>& standardized_sample, double bandwidth) {
    if (standardized_sample.rows() < 1)
        throw std::invalid_argument("make_density_field: empty sample");
    if (!(bandwidth > 0.0))
        throw std::invalid_argument("make_density_field: bandwidth must be positive");
    DensityField field;
    field.sample = standardized_sample;
    field.bandwidth = bandwidth;
    return field;
}

double density_at(const DensityField& field, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("density_at: non-finite query location");
    const double h2 = field.bandwidth * field.bandwidth;
    const double norm = 1.0 / (2.0 * std::numbers::pi * h2);
    const double zx = (x - field.mean(0)) / field.std(0);
    const double zy = (y - field.mean(1)) / field.std(1);
    const Array sq = (field.sample.col(0).array() - zx).square() +
                     (field.sample.col(1).array() - zy).square();
    return norm * (-sq / (2.0 * h2)).exp().mean();
}

PointDensities point_densities(const DensityField& field) {
    const Index n = field.sample.rows();
    PointDensities out;
    out.values.resize(n);
    const double h2 = field.bandwidth * field.bandwidth;
    const double norm = 1.0 / (2.0 * std::numbers::pi * h2);
    for (Index i = 0; i < n; ++i) {
        const Array sq = (field.sample.col(0).array() - field.sample(i, 0)).square() +
                         (field.sample.col(1).array() - field.sample(i, 1)).square();
        out.values(i) = norm * (-sq / (2.0 * h2)).exp().mean();
    }
    out.mean = out.values.mean();
    return out;
}

DensityGrid density_grid(const DensityField& field, double xmin, double xmax,
                         double ymin, double ymax, Index nx, Index ny) {
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("density_grid: resolution must be >= 2 per dimension");
    if (!(xmin < xmax) || !(ymin < ymax))
        throw std::invalid_argument("density_grid: inverted or degenerate bounding box");
    DensityGrid grid;
    grid.xs = Array::LinSpaced(nx, xmin, xmax);
    grid.ys = Array::LinSpaced(ny, ymin, ymax);
    grid.values.resize(ny, nx);
    for (Index iy = 0; iy < ny; ++iy)
        for (Index ix = 0; ix < nx; ++ix)
            grid.values(iy, ix) = density_at(field, grid.xs(ix), grid.ys(iy));
    return grid;
}

} // namespace stclust
