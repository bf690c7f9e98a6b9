#include "stclust/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stclust/geometry.hpp"
#include "stclust/kde.hpp"
#include "stclust/rng.hpp"
#include "stclust/weighting.hpp"

namespace stclust {

LabeledDataset generate(const MixtureSpec& spec) {
    if (spec.centers.empty()) throw std::invalid_argument("generate: need at least one center");
    if (spec.per_component < 1)
        throw std::invalid_argument("generate: perComponent must be >= 1");
    if (!(spec.sigma_wide > 0.0) || !(spec.sigma_tight > 0.0))
        throw std::invalid_argument("generate: sigmas must be positive");

    const Index per_cluster = 2 * static_cast<Index>(spec.per_component);
    const Index n = static_cast<Index>(spec.centers.size()) * per_cluster;
    LabeledDataset data;
    data.points.resize(n, 2);
    data.truth.resize(n);

    Rng rng(spec.seed);
    Index row = 0;
    for (std::size_t c = 0; c < spec.centers.size(); ++c) {
        for (const double sigma : {spec.sigma_wide, spec.sigma_tight}) {
            for (int j = 0; j < spec.per_component; ++j, ++row) {
                const auto [zx, zy] = rng.normal_pair();
                data.points(row, 0) = spec.centers[c](0) + sigma * zx;
                data.points(row, 1) = spec.centers[c](1) + sigma * zy;
                data.truth(row) = static_cast<int>(c) + 1;
            }
        }
    }
    return data;
}

namespace {

// Hungarian algorithm (potentials + augmenting paths) on a square cost
// matrix, minimizing. Returns col assignment per row.
std::vector<int> hungarian_min(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0); // col -> row, 1-based
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (match[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return row_to_col;
}

double comb2(Index x) { return x < 2 ? 0.0 : 0.5 * static_cast<double>(x) * (x - 1); }

} // namespace

std::vector<std::pair<int, int>> max_overlap_assignment(
    const Eigen::Ref<const Eigen::MatrixXi>& overlap) {
    const int r = static_cast<int>(overlap.rows());
    const int c = static_cast<int>(overlap.cols());
    if (r == 0 || c == 0) return {};
    const int m = std::max(r, c);
    // Pad to square and negate: maximum overlap == minimum cost.
    Matrix cost = Matrix::Zero(m, m);
    cost.topLeftCorner(r, c) = -overlap.cast<double>();
    const std::vector<int> row_to_col = hungarian_min(cost);

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < r; ++i) {
        const int j = row_to_col[static_cast<std::size_t>(i)];
        if (j >= 0 && j < c && overlap(i, j) > 0) pairs.emplace_back(i, j);
    }
    return pairs;
}

EvalReport evaluate(const Eigen::Ref<const ArrayXi>& predicted,
                    const Eigen::Ref<const ArrayXi>& truth) {
    const Index n = predicted.size();
    if (truth.size() != n)
        throw std::invalid_argument("evaluate: predicted and truth lengths differ");
    if (n == 0) throw std::invalid_argument("evaluate: empty labelling");

    EvalReport report;
    report.outliers = (predicted == 0).count();

    const int pred_max = predicted.maxCoeff();
    const int truth_max = truth.maxCoeff();

    // Overlap (contingency) table over non-noise predicted clusters.
    Eigen::MatrixXi overlap = Eigen::MatrixXi::Zero(std::max(pred_max, 0), std::max(truth_max, 0));
    for (Index i = 0; i < n; ++i)
        if (predicted(i) >= 1 && truth(i) >= 1) overlap(predicted(i) - 1, truth(i) - 1) += 1;

    for (const auto& [p, t] : max_overlap_assignment(overlap)) {
        report.matching.emplace_back(p + 1, t + 1);
        report.correct += overlap(p, t);
    }
    std::sort(report.matching.begin(), report.matching.end());
    report.incorrect = n - report.correct;

    // ARI over all points, with noise kept as a class of its own.
    std::map<int, Index> pred_sizes, truth_sizes;
    std::map<std::pair<int, int>, Index> joint;
    for (Index i = 0; i < n; ++i) {
        ++pred_sizes[predicted(i)];
        ++truth_sizes[truth(i)];
        ++joint[{predicted(i), truth(i)}];
    }
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, count] : joint) sum_ij += comb2(count);
    for (const auto& [key, count] : pred_sizes) sum_a += comb2(count);
    for (const auto& [key, count] : truth_sizes) sum_b += comb2(count);
    const double total_pairs = comb2(n);
    const double expected = total_pairs == 0.0 ? 0.0 : sum_a * sum_b / total_pairs;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    report.ari = denom == 0.0 ? 1.0 : (sum_ij - expected) / denom;
    return report;
}

std::vector<Table1Row> run_table1(const MixtureSpec& spec, const Table1Params& params) {
    const LabeledDataset data = generate(spec);
    const Matrix S = pairwise_spatial(data.points);

    std::vector<Table1Row> rows;
    rows.push_back({spec.seed, "dbscan", evaluate(dbscan(S, params.dbscan).labels, data.truth)});

    const DensityField field = fit_density(data.points);
    const PointDensities densities = point_densities(field);
    WeightConfig cfg;
    cfg.steepness = params.steepness > 0.0 ? params.steepness : default_steepness(densities);
    const Matrix W = weight_matrix(S, densities, cfg);
    rows.push_back({spec.seed, "weighted", evaluate(dbscan(W, params.weighted).labels, data.truth)});

    rows.push_back(
        {spec.seed, "kmeans", evaluate(kmeans(data.points, params.kmeans).clustering.labels, data.truth)});
    return rows;
}

} // namespace stclust
