#pragma once

#include <cstdint>
#include <vector>

#include "stclust/clustering.hpp"
#include "stclust/types.hpp"

namespace stclust {

/// Two-variance Gaussian mixture: per center, perComponent draws from
/// N(center, sigma_wide^2 I) plus perComponent draws from
/// N(center, sigma_tight^2 I), so each cluster has a dense core inside a
/// wide halo. Default centers sit at the corners of an axis-aligned square
/// of side 6.
struct MixtureSpec {
    std::vector<Eigen::RowVector2d> centers = {{-3.0, -3.0}, {3.0, -3.0}, {-3.0, 3.0}, {3.0, 3.0}};
    int per_component = 300;
    double sigma_wide = 1.0;
    double sigma_tight = 0.1;
    std::uint64_t seed = 0;
};

struct LabeledDataset {
    Points points;
    ArrayXi truth; // 1..C, C = number of centers
};

/// Deterministic given the seed: points are emitted center by center, wide
/// component first, each point consuming one Box-Muller pair (x, y).
LabeledDataset generate(const MixtureSpec& spec);

/// Outcome of comparing a predicted clustering against ground truth.
/// Predicted clusters are matched one-to-one to truth clusters by
/// maximum-total-overlap assignment; noise (label 0) is never matched, so
/// noise points always count as incorrect.
struct EvalReport {
    Index outliers = 0;
    Index correct = 0;
    Index incorrect = 0;
    double ari = 0.0;                          // noise treated as its own class
    std::vector<std::pair<int, int>> matching; // predicted label -> truth label
};

EvalReport evaluate(const Eigen::Ref<const ArrayXi>& predicted,
                    const Eigen::Ref<const ArrayXi>& truth);

/// Solves the assignment problem on an r x c overlap table, maximizing the
/// total matched overlap. Returns the chosen (row, col) pairs with positive
/// overlap. Exposed for the evaluation oracle tests.
std::vector<std::pair<int, int>> max_overlap_assignment(
    const Eigen::Ref<const Eigen::MatrixXi>& overlap);

struct Table1Params {
    DbscanParams dbscan;     // vanilla run
    DbscanParams weighted;   // run on the density-weighted matrix
    double steepness = 0.0;  // <= 0 means default_steepness from the data
    KMeansParams kmeans;
};

struct Table1Row {
    std::uint64_t seed = 0;
    std::string method; // "dbscan", "weighted" or "kmeans"
    EvalReport report;
};

/// Generates one dataset and runs vanilla DBSCAN, the density-weighted
/// pipeline (fit_density -> point_densities -> weight_matrix -> dbscan) and
/// k-means on it. Rows come back in that method order.
std::vector<Table1Row> run_table1(const MixtureSpec& spec, const Table1Params& params);

} // namespace stclust
