#include "stclust/geometry.hpp"

#include <cmath>
#include <numbers>

namespace stclust {

void validate_distance_matrix(const Eigen::Ref<const Matrix>& M, const std::string& name) {
    if (M.rows() == 0 || M.rows() != M.cols())
        throw std::invalid_argument(name + ": distance matrix must be square and nonempty");
    if (!M.allFinite())
        throw std::invalid_argument(name + ": distance matrix has non-finite entries");
    if ((M.array() < 0.0).any())
        throw std::invalid_argument(name + ": distance matrix has negative entries");
    if (M.diagonal().array().abs().maxCoeff() != 0.0)
        throw std::invalid_argument(name + ": distance matrix diagonal must be zero");
    if (M != M.transpose())
        throw std::invalid_argument(name + ": distance matrix must be symmetric");
}

double great_circle_km(const GeoPoint& a, const GeoPoint& b) {
    if (!is_valid(a) || !is_valid(b))
        throw std::invalid_argument("great_circle_km: coordinates out of range or non-finite");
    constexpr double deg = std::numbers::pi / 180.0;
    const double lat1 = a.lat * deg, lat2 = b.lat * deg;
    const double sdlat = std::sin(0.5 * (lat2 - lat1));
    const double sdlon = std::sin(0.5 * (b.lon - a.lon) * deg);
    const double h = sdlat * sdlat + std::cos(lat1) * std::cos(lat2) * sdlon * sdlon;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double euclidean(const PlanarPoint& a, const PlanarPoint& b) {
    if (!is_valid(a) || !is_valid(b))
        throw std::invalid_argument("euclidean: non-finite coordinates");
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

template <typename Point, typename Dist>
Matrix pairwise(std::span<const Point> points, Dist dist) {
    const Index n = static_cast<Index>(points.size());
    if (n == 0) throw std::invalid_argument("pairwise_spatial: empty point set");
    Matrix M = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            M(i, j) = M(j, i) = dist(points[i], points[j]);
    return M;
}

} // namespace

Matrix pairwise_spatial(std::span<const GeoPoint> points) {
    return pairwise(points, great_circle_km);
}

Matrix pairwise_spatial(std::span<const PlanarPoint> points) {
    return pairwise(points, euclidean);
}

Matrix pairwise_spatial(const Eigen::Ref<const Points>& points) {
    const Index n = points.rows();
    if (n == 0) throw std::invalid_argument("pairwise_spatial: empty point set");
    Matrix M = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            M(i, j) = M(j, i) = std::hypot(points(i, 0) - points(j, 0), points(i, 1) - points(j, 1));
    return M;
}

} // namespace stclust
