#pragma once

#include <optional>
#include <vector>

#include "stclust/rng.hpp"
#include "stclust/types.hpp"

namespace stclust {

/// DBSCAN / ST-DBSCAN parameters. eps2 absent means pure spatial DBSCAN;
/// when present, neighborhood membership requires BOTH the spatial distance
/// <= eps1 and the temporal distance <= eps2.
struct DbscanParams {
    double eps1 = 0.0;
    std::optional<double> eps2;
    int min_pts = 1;
};

enum class Role { Core, Border, Noise };

const char* to_string(Role role);

/// Per-point cluster assignment. Label 0 is noise; clusters are numbered
/// 1..cluster_count in order of first core-point discovery along the
/// ascending-index scan.
struct Clustering {
    ArrayXi labels;
    std::vector<Role> roles;
    int cluster_count = 0;
};

/// Indices j (self included) with S(i,j) <= eps1, and additionally
/// T(i,j) <= eps2 when a temporal matrix is given. Ascending order.
std::vector<Index> neighborhood(Index i, const Eigen::Ref<const Matrix>& S, double eps1,
                                const Matrix* T = nullptr,
                                std::optional<double> eps2 = std::nullopt);

/// DBSCAN over a precomputed distance matrix; ST-DBSCAN when params.eps2 is
/// set and a temporal matrix is supplied. A point is core iff its
/// neighborhood (self included) has at least min_pts members. Points are
/// scanned in ascending index order; a border point reachable from several
/// clusters keeps the first label that claims it.
Clustering dbscan(const Eigen::Ref<const Matrix>& S, const DbscanParams& params,
                  const Matrix* T = nullptr);

/// Re-derives every core/border/noise role from the matrices and throws
/// std::logic_error on any violation of the output contract.
void audit_clustering(const Eigen::Ref<const Matrix>& S, const DbscanParams& params,
                      const Clustering& result, const Matrix* T = nullptr);

struct KMeansParams {
    int k = 1;
    int max_iters = 100;
    int restarts = 1;
    std::uint64_t seed = 0;
};

/// k-means result; labels run 1..k and there is no noise label.
struct KMeansResult {
    Clustering clustering;
    Points centroids;
    double wss = 0.0;
};

/// Lloyd's algorithm with seeded uniform initialization (sampling centroids
/// without replacement from the data) and best-of-restarts by within-cluster
/// sum of squares. An emptied cluster is re-seeded to the point farthest
/// from its current centroid.
KMeansResult kmeans(const Eigen::Ref<const Points>& points, const KMeansParams& params);

/// Each point's k-th nearest-neighbor distance (self excluded), sorted
/// descending -- the Ester et al. plot used to pick eps. Requires k < n.
Array knn_distance_profile(const Eigen::Ref<const Matrix>& M, int k);

/// Best WSS per k over an inclusive range, for the elbow method.
std::vector<std::pair<int, double>> wss_profile(const Eigen::Ref<const Points>& points,
                                                int k_min, int k_max,
                                                const KMeansParams& params);

} // namespace stclust
