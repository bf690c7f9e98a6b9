#include "stclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace stclust {

const char* to_string(Role role) {
    switch (role) {
        case Role::Core: return "core";
        case Role::Border: return "border";
        case Role::Noise: return "noise";
    }
    return "noise";
}

namespace {

void check_dbscan_inputs(const Eigen::Ref<const Matrix>& S, const DbscanParams& params,
                         const Matrix* T) {
    if (S.rows() != S.cols() || S.rows() == 0)
        throw std::invalid_argument("dbscan: spatial matrix must be square and nonempty");
    if (!(params.eps1 > 0.0)) throw std::invalid_argument("dbscan: eps1 must be positive");
    if (params.min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
    if (params.eps2) {
        if (!(*params.eps2 > 0.0)) throw std::invalid_argument("dbscan: eps2 must be positive");
        if (!T) throw std::invalid_argument("dbscan: eps2 set but no temporal matrix given");
        if (T->rows() != S.rows() || T->cols() != S.cols())
            throw std::invalid_argument("dbscan: temporal matrix dimensions differ from spatial");
    }
}

} // namespace

std::vector<Index> neighborhood(Index i, const Eigen::Ref<const Matrix>& S, double eps1,
                                const Matrix* T, std::optional<double> eps2) {
    const Index n = S.rows();
    if (i < 0 || i >= n) throw std::invalid_argument("neighborhood: index out of range");
    if (eps2 && !T) throw std::invalid_argument("neighborhood: eps2 set without temporal matrix");
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j) {
        if (S(i, j) > eps1) continue;
        if (eps2 && (*T)(i, j) > *eps2) continue;
        out.push_back(j);
    }
    return out;
}

Clustering dbscan(const Eigen::Ref<const Matrix>& S, const DbscanParams& params, const Matrix* T) {
    check_dbscan_inputs(S, params, T);
    const Index n = S.rows();
    constexpr int kUnvisited = -1;
    constexpr int kNoise = 0;

    Clustering result;
    result.labels = ArrayXi::Constant(n, kUnvisited);
    result.roles.assign(static_cast<std::size_t>(n), Role::Noise);

    const Matrix* temporal = params.eps2 ? T : nullptr;
    auto neighbors = [&](Index p) { return neighborhood(p, S, params.eps1, temporal, params.eps2); };

    int cluster = 0;
    for (Index i = 0; i < n; ++i) {
        if (result.labels(i) != kUnvisited) continue;
        std::vector<Index> seeds = neighbors(i);
        if (static_cast<int>(seeds.size()) < params.min_pts) {
            result.labels(i) = kNoise; // may still become a border point later
            continue;
        }
        ++cluster;
        result.labels(i) = cluster;
        result.roles[static_cast<std::size_t>(i)] = Role::Core;

        std::deque<Index> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const Index q = queue.front();
            queue.pop_front();
            if (result.labels(q) == kNoise) {
                result.labels(q) = cluster; // border: known non-core
                result.roles[static_cast<std::size_t>(q)] = Role::Border;
                continue;
            }
            if (result.labels(q) != kUnvisited) continue;
            result.labels(q) = cluster;
            const std::vector<Index> q_neighbors = neighbors(q);
            if (static_cast<int>(q_neighbors.size()) >= params.min_pts) {
                result.roles[static_cast<std::size_t>(q)] = Role::Core;
                queue.insert(queue.end(), q_neighbors.begin(), q_neighbors.end());
            } else {
                result.roles[static_cast<std::size_t>(q)] = Role::Border;
            }
        }
    }
    result.cluster_count = cluster;
    return result;
}

void audit_clustering(const Eigen::Ref<const Matrix>& S, const DbscanParams& params,
                      const Clustering& result, const Matrix* T) {
    check_dbscan_inputs(S, params, T);
    const Index n = S.rows();
    if (result.labels.size() != n || static_cast<Index>(result.roles.size()) != n)
        throw std::logic_error("audit: result size differs from matrix size");
    const Matrix* temporal = params.eps2 ? T : nullptr;

    for (Index i = 0; i < n; ++i) {
        const std::vector<Index> nb = neighborhood(i, S, params.eps1, temporal, params.eps2);
        const bool is_core = static_cast<int>(nb.size()) >= params.min_pts;
        const Role role = result.roles[static_cast<std::size_t>(i)];
        const int label = result.labels(i);

        if (is_core != (role == Role::Core))
            throw std::logic_error("audit: core flag disagrees with neighborhood count");
        if ((label == 0) != (role == Role::Noise))
            throw std::logic_error("audit: noise label and role disagree");
        if (label < 0 || label > result.cluster_count)
            throw std::logic_error("audit: label outside 0..cluster_count");
        if (role == Role::Core && label == 0)
            throw std::logic_error("audit: core point labelled noise");
        if (role == Role::Border) {
            bool attached = false;
            for (Index j : nb)
                if (j != i && result.labels(j) == label &&
                    result.roles[static_cast<std::size_t>(j)] == Role::Core)
                    attached = true;
            if (!attached)
                throw std::logic_error("audit: border point has no core neighbor in its cluster");
        }
        if (role == Role::Noise) {
            for (Index j : nb)
                if (j != i && result.roles[static_cast<std::size_t>(j)] == Role::Core)
                    throw std::logic_error("audit: noise point inside a core neighborhood");
        }
    }
}

namespace {

double squared_dist(const Eigen::Ref<const Points>& pts, Index i, const Eigen::RowVector2d& c) {
    const double dx = pts(i, 0) - c(0);
    const double dy = pts(i, 1) - c(1);
    return dx * dx + dy * dy;
}

struct LloydRun {
    ArrayXi assign; // 0-based centroid index per point
    Points centroids;
    double wss = 0.0;
};

LloydRun lloyd_once(const Eigen::Ref<const Points>& pts, int k, int max_iters, Rng& rng) {
    const Index n = pts.rows();
    LloydRun run;
    run.centroids.resize(k, 2);

    // Initial centroids: k distinct data points, partial Fisher-Yates.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int c = 0; c < k; ++c) {
        const auto pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - c))) + c;
        std::swap(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(pick)]);
        run.centroids.row(c) = pts.row(order[static_cast<std::size_t>(c)]);
    }

    run.assign = ArrayXi::Constant(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        // Assignment step; ties go to the lowest centroid index.
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_dist(pts, i, run.centroids.row(0));
            for (int c = 1; c < k; ++c) {
                const double d = squared_dist(pts, i, run.centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.assign(i) != best) {
                run.assign(i) = best;
                changed = true;
            }
        }

        // Update step with deterministic empty-cluster re-seeding.
        Points sums = Points::Zero(k, 2);
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            sums.row(run.assign(i)) += pts.row(i);
            ++counts[static_cast<std::size_t>(run.assign(i))];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                run.centroids.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                Index farthest = 0;
                double far_d = -1.0;
                for (Index i = 0; i < n; ++i) {
                    const double d = squared_dist(pts, i, run.centroids.row(run.assign(i)));
                    if (d > far_d) {
                        far_d = d;
                        farthest = i;
                    }
                }
                run.centroids.row(c) = pts.row(farthest);
                changed = true;
            }
        }
        if (!changed) break;
    }

    run.wss = 0.0;
    for (Index i = 0; i < n; ++i) run.wss += squared_dist(pts, i, run.centroids.row(run.assign(i)));
    return run;
}

} // namespace

KMeansResult kmeans(const Eigen::Ref<const Points>& points, const KMeansParams& params) {
    const Index n = points.rows();
    if (params.k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (static_cast<Index>(params.k) > n)
        throw std::invalid_argument("kmeans: k exceeds the number of points");
    if (params.max_iters < 1 || params.restarts < 1)
        throw std::invalid_argument("kmeans: max_iters and restarts must be >= 1");

    Rng rng(params.seed);
    LloydRun best;
    best.wss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < params.restarts; ++r) {
        LloydRun run = lloyd_once(points, params.k, params.max_iters, rng);
        if (run.wss < best.wss) best = std::move(run);
    }

    KMeansResult result;
    result.clustering.labels = best.assign + 1;
    result.clustering.roles.assign(static_cast<std::size_t>(n), Role::Core);
    result.clustering.cluster_count = params.k;
    result.centroids = std::move(best.centroids);
    result.wss = best.wss;
    return result;
}

Array knn_distance_profile(const Eigen::Ref<const Matrix>& M, int k) {
    const Index n = M.rows();
    if (M.cols() != n || n == 0)
        throw std::invalid_argument("knn_distance_profile: matrix must be square and nonempty");
    if (k < 1 || static_cast<Index>(k) >= n)
        throw std::invalid_argument("knn_distance_profile: need 1 <= k < n");
    Array profile(n);
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
        row.clear();
        for (Index j = 0; j < n; ++j)
            if (j != i) row.push_back(M(i, j));
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        profile(i) = row[static_cast<std::size_t>(k - 1)];
    }
    std::sort(profile.begin(), profile.end(), std::greater<>());
    return profile;
}

std::vector<std::pair<int, double>> wss_profile(const Eigen::Ref<const Points>& points,
                                                int k_min, int k_max, const KMeansParams& params) {
    if (k_min < 1 || k_max < k_min || static_cast<Index>(k_max) > points.rows())
        throw std::invalid_argument("wss_profile: invalid k range");
    std::vector<std::pair<int, double>> profile;
    profile.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k) {
        KMeansParams p = params;
        p.k = k;
        profile.emplace_back(k, kmeans(points, p).wss);
    }
    return profile;
}

} // namespace stclust
