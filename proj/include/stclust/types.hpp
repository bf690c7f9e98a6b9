#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace stclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
using ArrayXi = Eigen::ArrayXi;
using Index = Eigen::Index;

// n x 2 point set, one row per location
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Geographic location in degrees. lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

/// Location on the unitless simulation plane.
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

inline bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) &&
           p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

inline bool is_valid(const PlanarPoint& p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
}

/// Throws std::invalid_argument unless M is a valid distance matrix:
/// square, finite, nonnegative, symmetric and zero on the diagonal.
void validate_distance_matrix(const Eigen::Ref<const Matrix>& M, const std::string& name);

} // namespace stclust
