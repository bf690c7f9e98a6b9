#pragma once

#include <span>

#include "stclust/types.hpp"

namespace stclust {

/// Mean Earth radius in km (IUGG).
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance in km between two geographic points, via the
/// haversine formula on a sphere of radius kEarthRadiusKm.
double great_circle_km(const GeoPoint& a, const GeoPoint& b);

/// L2 distance on the simulation plane.
double euclidean(const PlanarPoint& a, const PlanarPoint& b);

/// Symmetric pairwise distance matrix (km) over geographic points. n >= 1.
Matrix pairwise_spatial(std::span<const GeoPoint> points);

/// Symmetric pairwise distance matrix (plane units) over planar points. n >= 1.
Matrix pairwise_spatial(std::span<const PlanarPoint> points);

/// Rows of an n x 2 matrix interpreted as planar (x, y) points.
Matrix pairwise_spatial(const Eigen::Ref<const Points>& points);

} // namespace stclust
