#include <doctest.h>

#include <cmath>

#include "stclust/geometry.hpp"
#include "stclust/rng.hpp"
#include "stclust/simulation.hpp"
#include "stclust/weighting.hpp"

using namespace stclust;

TEST_CASE("logistic_weight: midpoint, asymptotes and closed forms") {
    CHECK(logistic_weight(0.7, 0.7, 3.0) == 1.0);
    CHECK(logistic_weight(1e6, 0.0, 1.0) == 2.0);  // saturates at L = 2
    CHECK(logistic_weight(-1e6, 0.0, 1.0) == 0.0); // and at 0
    // d_bar + ln(3)/k maps to exactly 1.5
    for (double k : {0.5, 1.0, 4.0}) {
        CHECK(logistic_weight(2.0 + std::log(3.0) / k, 2.0, k) ==
              doctest::Approx(1.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(logistic_weight(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(logistic_weight(1.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("logistic_weight is strictly increasing") {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double d = -5.0 + 10.0 * i / 1000.0;
        const double f = logistic_weight(d, 0.0, 1.3);
        CHECK(f > prev);
        CHECK(f < 2.0);
        prev = f;
    }
}

TEST_CASE("weight_matrix: equal densities leave the matrix untouched") {
    Matrix S(3, 3);
    S << 0, 1, 2, 1, 0, 4, 2, 4, 0;
    PointDensities d;
    d.values = Array::Constant(3, 0.42);
    d.mean = 0.42;
    const Matrix W = weight_matrix(S, d, {5.0});
    CHECK(W == S);
}

TEST_CASE("weight_matrix: direct arithmetic example") {
    // Densities engineered so f(d_0) = 1.8 and f(d_1) = 1.4 with k = 1,
    // d_bar = 0: f = 1.8 needs e^-d = 1/9, f = 1.4 needs e^-d = 3/7.
    PointDensities d;
    d.values.resize(2);
    d.values << std::log(9.0), std::log(7.0 / 3.0);
    d.mean = 0.0;
    Matrix S(2, 2);
    S << 0, 10, 10, 0;
    const Matrix W = weight_matrix(S, d, {1.0});
    CHECK(W(0, 1) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(W(1, 0) == W(0, 1));
    CHECK(W(0, 0) == 0.0);
}

TEST_CASE("weight_matrix: dimension mismatch throws") {
    PointDensities d;
    d.values = Array::Constant(3, 1.0);
    d.mean = 1.0;
    CHECK_THROWS_AS(weight_matrix(Matrix::Zero(2, 2), d, {1.0}), std::invalid_argument);
}

TEST_CASE("weight_matrix stretches dense cores and compresses outskirts") {
    MixtureSpec spec;
    spec.seed = 9;
    const LabeledDataset data = generate(spec);
    const Matrix S = pairwise_spatial(data.points);
    const PointDensities dens = point_densities(fit_density(data.points));
    const Matrix W = weight_matrix(S, dens, {default_steepness(dens)});

    // Index layout of generate(): per center, wide draws then tight draws.
    const int per = spec.per_component;
    double tight_s = 0, tight_w = 0, out_s = 0, out_w = 0;
    long tight_n = 0, out_n = 0;
    for (Index c = 0; c < 4; ++c) {
        const Index base = c * 2 * per;
        for (Index a = base + per; a < base + 2 * per; ++a)
            for (Index b = a + 1; b < base + 2 * per; ++b) {
                tight_s += S(a, b);
                tight_w += W(a, b);
                ++tight_n;
            }
        // outskirt = wide-component points more than 1.5 sigma from their center
        std::vector<Index> outskirt;
        for (Index a = base; a < base + per; ++a) {
            const double dx = data.points(a, 0) - spec.centers[static_cast<std::size_t>(c)](0);
            const double dy = data.points(a, 1) - spec.centers[static_cast<std::size_t>(c)](1);
            if (std::hypot(dx, dy) > 1.5 * spec.sigma_wide) outskirt.push_back(a);
        }
        for (std::size_t i = 0; i < outskirt.size(); ++i)
            for (std::size_t j = i + 1; j < outskirt.size(); ++j) {
                out_s += S(outskirt[i], outskirt[j]);
                out_w += W(outskirt[i], outskirt[j]);
                ++out_n;
            }
    }
    REQUIRE(tight_n > 0);
    REQUIRE(out_n > 0);
    CHECK(tight_w / tight_n > tight_s / tight_n);
    CHECK(out_w / out_n < out_s / out_n);
}

TEST_CASE("default_steepness is one over the population std") {
    PointDensities d;
    d.values.resize(2);
    d.values << 1.0, 3.0; // mean 2, population std 1
    d.mean = 2.0;
    CHECK(default_steepness(d) == doctest::Approx(1.0).epsilon(1e-14));

    const double k = default_steepness(d);
    CHECK(logistic_weight(1.0, 2.0, k) == doctest::Approx(0.5378828427399902).epsilon(1e-3));
    CHECK(logistic_weight(3.0, 2.0, k) == doctest::Approx(1.4621171572600098).epsilon(1e-3));

    PointDensities constant;
    constant.values = Array::Constant(4, 2.5);
    constant.mean = 2.5;
    CHECK_THROWS_AS(default_steepness(constant), std::invalid_argument);
}

TEST_CASE("weight matrix invariants on random instances") {
    Rng rng(31);
    const Index n = 20;
    Points pts(n, 2);
    for (Index i = 0; i < n; ++i) {
        pts(i, 0) = rng.uniform() * 8.0;
        pts(i, 1) = rng.uniform() * 8.0;
    }
    const Matrix S = pairwise_spatial(pts);
    const PointDensities dens = point_densities(fit_density(pts));
    const Matrix W = weight_matrix(S, dens, {default_steepness(dens)});

    validate_distance_matrix(W, "W");
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            CHECK(W(i, j) == W(j, i));
            CHECK(W(i, j) >= 0.0);
            CHECK(W(i, j) < 2.0 * S(i, j));
        }

    // Monotonicity: raising one density weakly increases its whole row.
    PointDensities bumped = dens;
    bumped.values(3) += 0.5 * dens.mean;
    const Matrix W2 = weight_matrix(S, bumped, {default_steepness(dens)});
    for (Index j = 0; j < n; ++j)
        if (j != 3) CHECK(W2(3, j) >= W(3, j));

    // k -> 0+ drives W back to S.
    const Matrix W0 = weight_matrix(S, dens, {1e-12});
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            CHECK(W0(i, j) == doctest::Approx(S(i, j)).epsilon(1e-9));
}

TEST_CASE("midpoint neutrality is exact") {
    PointDensities d;
    d.values.resize(3);
    d.values << 0.3, 0.3, 0.9;
    d.mean = 0.3; // first two points sit exactly at the midpoint
    Matrix S(3, 3);
    S << 0, 7.25, 1, 7.25, 0, 2, 1, 2, 0;
    const Matrix W = weight_matrix(S, d, {2.0});
    CHECK(W(0, 1) == S(0, 1));
    CHECK(W(1, 0) == S(1, 0));
}
