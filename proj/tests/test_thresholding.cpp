#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mobscope/errors.hpp"
#include "mobscope/rng.hpp"
#include "mobscope/thresholding.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace mobscope;
using testutil::dataset_from_pairs;

namespace {

// Curve with the given acc values at thresholds 1..n (node/edge counts are
// irrelevant to the elbow).
ThresholdCurve curve_of(const std::vector<double>& acc) {
    ThresholdCurve c;
    for (std::size_t i = 0; i < acc.size(); ++i)
        c.points.push_back({static_cast<int>(i + 1), 0, 0, acc[i]});
    return c;
}

// Max perpendicular distance to the chord on the min-max normalized curve,
// evaluated point by point; smaller threshold wins ties.
int elbow_by_formula(const std::vector<double>& acc) {
    const int n = static_cast<int>(acc.size());
    double lo = acc[0], hi = acc[0];
    for (double a : acc) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    const double span = hi - lo;
    auto X = [&](int i) { return n > 1 ? static_cast<double>(i) / (n - 1) : 0.0; };
    auto Y = [&](int i) { return span > 0 ? (acc[i] - lo) / span : 0.0; };
    const double x0 = X(0), y0 = Y(0), x1 = X(n - 1), y1 = Y(n - 1);
    const double len = std::hypot(x1 - x0, y1 - y0);
    int best = 0;
    double best_d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d =
            std::fabs((y1 - y0) * X(i) - (x1 - x0) * Y(i) + x1 * y0 - y1 * x0) / len;
        if (d > best_d + 1e-12) {
            best_d = d;
            best = i;
        }
    }
    if (best_d <= 1e-12) best = 0;
    return best + 1;  // threshold = index + 1 for curves starting at t=1
}

}  // namespace

TEST_CASE("sweep zeroes out past the max pair weight") {
    // a-b share 2 videos, nothing heavier
    auto ds = dataset_from_pairs("ch", {{"v1", "a"}, {"v1", "b"}, {"v2", "a"}, {"v2", "b"}});
    auto curve = sweep_thresholds(ds, 1, 10);
    REQUIRE(curve.points.size() == 10);
    for (const auto& p : curve.points) {
        if (p.threshold >= 3) {
            CHECK(p.n_edges == 0);
            CHECK(p.n_nodes == 0);
            CHECK(p.avg_clustering_coeff == 0.0);
        } else {
            CHECK(p.n_edges == 1);
        }
    }
}

TEST_CASE("single video: complete graph at t=1, empty after") {
    auto ds = dataset_from_pairs("ch", {{"v", "a"}, {"v", "b"}, {"v", "c"}, {"v", "d"}});
    auto curve = sweep_thresholds(ds, 1, 5);
    REQUIRE(curve.points.size() == 5);
    CHECK(curve.points[0].avg_clustering_coeff == doctest::Approx(1.0));
    CHECK(curve.points[0].n_nodes == 4);
    CHECK(curve.points[0].n_edges == 6);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].n_edges == 0);
        CHECK(curve.points[i].avg_clustering_coeff == 0.0);
    }
}

TEST_CASE("each sweep point equals an independent rebuild at that threshold") {
    Rng rng(555);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < 800; ++i)
        pairs.emplace_back("v" + std::to_string(rng.below(12)),
                           "u" + std::to_string(rng.below(30)));
    auto ds = dataset_from_pairs("ch", pairs);
    auto curve = sweep_thresholds(ds, 1, 8);
    REQUIRE(curve.points.size() == 8);
    for (const auto& p : curve.points) {
        auto g = build_cocommenter_graph(ds, p.threshold);
        auto m = graph_metrics(g);
        CHECK(p.n_nodes == m.n_nodes);
        CHECK(p.n_edges == m.n_edges);
        CHECK(p.avg_clustering_coeff ==
              doctest::Approx(m.average_clustering_coefficient).epsilon(1e-12));
    }
}

TEST_CASE("sweep honors custom bounds and validates them") {
    auto ds = dataset_from_pairs("ch", {{"v", "a"}, {"v", "b"}});
    auto curve = sweep_thresholds(ds, 2, 4);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points.front().threshold == 2);
    CHECK(curve.points.back().threshold == 4);
    CHECK_THROWS_AS(sweep_thresholds(ds, 0, 5), ConfigError);
    CHECK_THROWS_AS(sweep_thresholds(ds, 5, 4), ConfigError);
}

TEST_CASE("collinear curve falls back to the smallest threshold") {
    std::vector<double> acc;
    for (int t = 1; t <= 10; ++t) acc.push_back(1.0 - 0.05 * t);
    CHECK(elbow_point(curve_of(acc)) == 1);
}

TEST_CASE("flat curve falls back to the smallest threshold") {
    CHECK(elbow_point(curve_of({0.4, 0.4, 0.4, 0.4})) == 1);
    CHECK(elbow_point(curve_of({0.0, 0.0, 0.0})) == 1);
}

TEST_CASE("hand-checked knee on a measured-looking curve") {
    std::vector<double> acc = {0.90, 0.55, 0.40, 0.38, 0.37, 0.36, 0.36, 0.35, 0.35, 0.35};
    // formula-evaluated knee (verified by hand before the implementation existed)
    CHECK(elbow_by_formula(acc) == 3);
    CHECK(elbow_point(curve_of(acc)) == 3);
}

TEST_CASE("two-segment piecewise-linear curves break at the breakpoint") {
    for (int bp = 2; bp <= 9; ++bp) {
        std::vector<double> acc;
        for (int t = 1; t <= 10; ++t) {
            if (t <= bp)
                acc.push_back(1.0 - 0.20 * (t - 1));  // steep leg
            else
                acc.push_back(1.0 - 0.20 * (bp - 1) - 0.01 * (t - bp));  // shallow leg
        }
        CAPTURE(bp);
        CHECK(elbow_point(curve_of(acc)) == bp);
        CHECK(elbow_by_formula(acc) == bp);
    }
}

TEST_CASE("elbow matches the exhaustive distance formula on random curves") {
    Rng rng(808);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> acc;
        const int n = 3 + static_cast<int>(rng.below(8));
        for (int i = 0; i < n; ++i) acc.push_back(rng.next_double());
        CAPTURE(trial);
        CHECK(elbow_point(curve_of(acc)) == elbow_by_formula(acc));
    }
}

TEST_CASE("ties resolve to the smaller threshold") {
    // symmetric V-shape: equal distances at both ends of the dip
    CHECK(elbow_point(curve_of({1.0, 0.0, 0.0, 1.0})) ==
          elbow_by_formula({1.0, 0.0, 0.0, 1.0}));
    // equal consecutive knees
    std::vector<double> acc = {1.0, 0.5, 0.5, 0.5, 0.5};
    CHECK(elbow_point(curve_of(acc)) == 2);
}

TEST_CASE("elbow respects the curve's own threshold labels") {
    ThresholdCurve c;
    for (int t = 4; t <= 9; ++t)
        c.points.push_back({t, 0, 0, t <= 5 ? 1.0 - 0.3 * (t - 4) : 0.7 - 0.01 * (t - 5)});
    CHECK(elbow_point(c) == 5);

    ThresholdCurve flat;
    for (int t = 3; t <= 6; ++t) flat.points.push_back({t, 0, 0, 0.2});
    CHECK(elbow_point(flat) == 3);  // degenerate: smallest threshold in range
}

TEST_CASE("elbow needs at least three points") {
    CHECK_THROWS_AS(elbow_point(curve_of({1.0, 0.5})), TooFewPointsError);
    CHECK_THROWS_AS(elbow_point(curve_of({})), TooFewPointsError);
}
