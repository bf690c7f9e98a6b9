#include "stclust/dtw.hpp"

#include <cmath>
#include <limits>

namespace stclust {

double dtw_distance(const Eigen::Ref<const Array>& a, const Eigen::Ref<const Array>& b) {
    const Index na = a.size();
    const Index nb = b.size();
    if (na == 0 || nb == 0) throw std::invalid_argument("dtw_distance: empty series");

    constexpr double inf = std::numeric_limits<double>::infinity();
    // Rolling rows of the (na+1) x (nb+1) cumulative cost matrix.
    Array prev = Array::Constant(nb + 1, inf);
    Array curr(nb + 1);
    prev(0) = 0.0;
    for (Index i = 1; i <= na; ++i) {
        curr(0) = inf;
        const double ai = a(i - 1);
        for (Index j = 1; j <= nb; ++j) {
            const double d = ai - b(j - 1);
            curr(j) = d * d + std::min({prev(j), curr(j - 1), prev(j - 1)});
        }
        std::swap(prev, curr);
    }
    return std::sqrt(prev(nb));
}

Matrix pairwise_temporal(const std::vector<Array>& series) {
    const Index n = static_cast<Index>(series.size());
    if (n == 0) throw std::invalid_argument("pairwise_temporal: empty series list");
    for (Index i = 0; i < n; ++i) {
        if (series[i].size() == 0)
            throw std::invalid_argument("pairwise_temporal: series " + std::to_string(i) +
                                        " is empty");
        if (series[i].size() != series[0].size())
            throw std::invalid_argument("pairwise_temporal: series " + std::to_string(i) +
                                        " has length " + std::to_string(series[i].size()) +
                                        ", expected " + std::to_string(series[0].size()));
    }
    Matrix M = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            M(i, j) = M(j, i) = dtw_distance(series[i], series[j]);
    return M;
}

Matrix pairwise_temporal(const Eigen::Ref<const Matrix>& series) {
    const Index n = series.rows();
    if (n == 0 || series.cols() == 0)
        throw std::invalid_argument("pairwise_temporal: empty series matrix");
    Matrix M = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const Array row_i = series.row(i).transpose().array();
        for (Index j = i + 1; j < n; ++j) {
            const Array row_j = series.row(j).transpose().array();
            M(i, j) = M(j, i) = dtw_distance(row_i, row_j);
        }
    }
    return M;
}

Array znormalize(const Eigen::Ref<const Array>& series) {
    const double mean = series.mean();
    const double sd = std::sqrt((series - mean).square().mean());
    if (sd == 0.0) return Array::Zero(series.size());
    return (series - mean) / sd;
}

} // namespace stclust
