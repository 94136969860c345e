#include <doctest.h>

#include <cmath>
#include <random>

#include "attractors/featurize.hpp"
#include "attractors/models.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace attractors;

namespace {

FeatureMatrix blobs(std::mt19937_64& rng, const std::vector<Vector>& centers, int per,
                    double spread) {
    std::normal_distribution<double> g(0.0, spread);
    const auto dim = centers.front().size();
    FeatureMatrix x(static_cast<Eigen::Index>(centers.size()) * per, dim);
    Eigen::Index r = 0;
    for (const auto& c : centers)
        for (int i = 0; i < per; ++i, ++r)
            for (Eigen::Index k = 0; k < dim; ++k)
                x(r, k) = c[k] + g(rng);
    return x;
}

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_SUITE("featurize") {

TEST_CASE("dbscan matches the neighbour-graph reference") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const int n = 1 + static_cast<int>(rng() % 60);
        const int k = 1 + static_cast<int>(rng() % 6);  // k > 4 uses the brute-force index
        FeatureMatrix x(n, k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j)
                x(i, j) = u(rng);
        if (t % 5 == 0 && n > 2)
            x.row(1) = x.row(0);  // duplicates
        const double eps = 0.02 + 0.5 * u(rng);
        const int min_pts = 1 + static_cast<int>(rng() % 6);
        CHECK(dbscan(x, eps, min_pts) == oracles::dbscan(x, eps, min_pts));
    }
}

TEST_CASE("dbscan includes points at exactly the radius") {
    FeatureMatrix x(3, 1);
    x << 0.0, 0.5, 1.0;
    CHECK(dbscan(x, 0.5, 3) == GroupLabels{1, 1, 1});
    CHECK(dbscan(x, 0.49, 2) == GroupLabels{-1, -1, -1});
    CHECK_THROWS_AS(dbscan(x, 0.0, 2), ConfigError);
    CHECK_THROWS_AS(dbscan(x, 0.1, 0), ConfigError);
}

TEST_CASE("silhouettes by hand") {
    // A = {0, 2}, B = {11, 11}:
    //   s(0) = 1 - 2/11, s(2) = 1 - 2/9, s(11) = 1 - 0/10.
    FeatureMatrix x(4, 1);
    x << 0, 2, 11, 11;
    const auto s = silhouettes(x, {1, 1, 2, 2});
    CHECK(s[0] == doctest::Approx(9.0 / 11));
    CHECK(s[0] == doctest::Approx(0.8182).epsilon(1e-4));
    CHECK(s[1] == doctest::Approx(7.0 / 9));
    CHECK(s[2] == doctest::Approx(1.0));
    CHECK(s[3] == doctest::Approx(1.0));

    // Noise gets NaN and counts as zero in the score.
    FeatureMatrix y(5, 1);
    y << 0, 2, 11, 11, 50;
    const GroupLabels l{1, 1, 2, 2, -1};
    const auto t = silhouettes(y, l);
    CHECK(std::isnan(t[4]));
    CHECK(clustering_score(y, l) == doctest::Approx((9.0 / 11 + 7.0 / 9 + 2) / 5));
    CHECK(clustering_score(y, {1, 1, 1, 1, -1}) == -1.0);
    CHECK_THROWS_AS(silhouettes(y, {1, 1, 1, 1, 1}), InputError);
}

TEST_CASE("rescaling maps columns to the unit interval") {
    FeatureMatrix x(3, 3);
    x << 1, 5, 7, 2, 5, 8, 3, 5, 9;
    const auto s = rescale_features(x);
    CHECK(s.col(0).minCoeff() == 0.0);
    CHECK(s.col(0).maxCoeff() == 1.0);
    CHECK(s(1, 0) == doctest::Approx(0.5));
    CHECK(s.col(1).isZero());
    x(0, 2) = std::nan("");
    CHECK_THROWS_AS(rescale_features(x), InputError);
}

TEST_CASE("radius search separates well separated blobs") {
    std::mt19937_64 rng(5);
    const auto x = blobs(rng, {v2(0, 0), v2(5, 0), v2(0, 5)}, 40, 0.2);
    const auto scaled = rescale_features(x);
    const double r = optimal_radius(scaled, 5);
    const auto labels = dbscan(scaled, r, 5);
    CHECK(*std::max_element(labels.begin(), labels.end()) == 3);
    for (int b = 0; b < 3; ++b)
        for (int i = 1; i < 40; ++i)
            CHECK(labels[b * 40 + i] == labels[b * 40]);
    // Through the grouping front end as well.
    CHECK(oracles::canonical(group_features(x, Clustering{5, std::nullopt})) ==
          oracles::canonical(labels));
}

TEST_CASE("identical features form one group") {
    FeatureMatrix x = FeatureMatrix::Constant(20, 2, 0.3);
    CHECK(group_features(x, Clustering{}) == GroupLabels(20, 1));
}

TEST_CASE("histogram grouping") {
    FeatureMatrix x(6, 1);
    x << 0.0, 0.99, 1.0, 2.0, 2.5, 3.0;
    const auto l = group_by_histogram(x, {{0.0, 1.0, 2.0, 3.0}});
    // Bin [2, 3] is closed; 2.5 and 3.0 fall in it, 2.0 too.
    CHECK(l == GroupLabels{1, 1, 2, 3, 3, 3});
    x(0, 0) = -0.1;
    x(5, 0) = 3.1;
    const auto m = group_by_histogram(x, {{0.0, 1.0, 2.0, 3.0}});
    CHECK(m.front() == -1);
    CHECK(m.back() == -1);
    CHECK_THROWS_AS(group_by_histogram(x, {{1.0, 0.0}}), ConfigError);
}

TEST_CASE("two-dimensional histogram labels follow bin order") {
    FeatureMatrix x(4, 2);
    x << 1.5, 0.5,  //
        0.5, 1.5,   //
        0.5, 0.5,   //
        1.5, 0.6;
    const auto l = group_by_histogram(x, {{0, 1, 2}, {0, 1, 2}});
    CHECK(l == GroupLabels{3, 2, 1, 3});
}

TEST_CASE("nearest template grouping") {
    std::map<int, Vector> t{{4, v2(0, 0)}, {2, v2(2, 0)}};
    FeatureMatrix x(3, 2);
    x << 0.1, 0, 1.0, 0, 1.9, 0.1;
    CHECK(group_by_nearest_template(x, t, 10.0) == GroupLabels{4, 2, 2});  // tie -> 2
    CHECK(group_by_nearest_template(x, t, 0.5) == GroupLabels{4, -1, 2});
}

TEST_CASE("featurize-group on the double well") {
    auto spec = double_well_spec();
    const auto sys = spec.make();
    BoxSampler s(spec.box, 12);
    IntegrationParams ip{spec.feature_total, spec.feature_transient, spec.feature_dt,
                         spec.feature_sample_dt};
    const auto a = featurize_fractions(sys, s, 400, spec.featurizer, Clustering{10, {}}, ip, 1);
    const auto b = featurize_fractions(sys, s, 400, spec.featurizer, Clustering{10, {}}, ip, 4);
    CHECK(a.labels == b.labels);
    CHECK(a.features == b.features);
    REQUIRE(a.attractors.size() == 2);
    for (std::uint64_t i = 0; i < 400; ++i) {
        const int l = a.labels[i];
        REQUIRE(l > 0);
        const double node = a.attractors.at(l).centroid()[0];
        CHECK((node > 0) == (s(i)[0] > 0));
    }
    for (const auto& [l, f] : a.fractions)
        CHECK(std::abs(f - 0.5) < 0.1);
}

TEST_CASE("diverging trajectories are excluded from grouping") {
    DynamicalSystem grow(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector&, double) {
            out = u.array().square().matrix();
        },
        Vector::Zero(1), Vector::Zero(0));
    Featurizer mean = [](const Trajectory& tr) { return Vector(tr.states.colwise().mean().transpose()); };
    // Positive starts blow up, negative ones creep to 0.
    IcSampler s = [](std::uint64_t i) { return Vector::Constant(1, i % 2 ? 1.0 : -1.0 - 0.01 * i); };
    const auto r = featurize_fractions(grow, s, 20, mean, Histogram{{{-1.0, 1.0}}},
                                       {10.0, 50.0, 0.01, 0.1}, 2);
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(r.labels[i] == (i % 2 ? -1 : 1));
    CHECK(r.fractions.at(-1) == 0.5);
}

}
