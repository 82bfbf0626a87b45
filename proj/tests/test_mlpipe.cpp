#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mobscope/errors.hpp"
#include "mobscope/mlpipe.hpp"
#include "mobscope/rng.hpp"
#include "oracles.hpp"

using namespace mobscope;

namespace {

std::string row_id(int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "ch%03d", i);
    return buf;
}

// FeatureMatrix whose first column carries the given values; remaining
// features filled from the rng (or zero).
FeatureMatrix matrix_from_columns(const std::vector<std::array<double, 20>>& rows) {
    FeatureMatrix m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        FeatureRow r;
        r.channel_id = row_id(static_cast<int>(i));
        r.threshold = 1;
        auto& f = r.features;
        const auto& v = rows[i];
        f.n_nodes = v[0];
        f.n_edges = v[1];
        f.total_unique_commenters = v[2];
        f.total_comments = v[3];
        f.cocommenter_ratio = v[4];
        f.average_degree = v[5];
        f.density = v[6];
        f.acc = v[7];
        f.modularity_q = v[8];
        f.n_cliques_ge5 = v[9];
        f.n_unique_clique_commenters = v[10];
        f.clique_commenters_over_total = v[11];
        f.clique_commenters_over_nodes = v[12];
        f.clique_avg_degree = v[13];
        f.clique_avg_degree_ratio = v[14];
        f.clique_acc = v[15];
        f.clique_acc_ratio = v[16];
        f.mean_clique_size = v[17];
        f.median_clique_size = v[18];
        f.max_clique_size = v[19];
        m.rows.push_back(std::move(r));
    }
    return m;
}

FeatureMatrix random_matrix(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 20>> rows(n);
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double() * 10.0;
    return matrix_from_columns(rows);
}

EmbeddedPoints points_of(const std::vector<std::vector<double>>& coords) {
    EmbeddedPoints p;
    p.coords.resize(static_cast<int>(coords.size()), static_cast<int>(coords[0].size()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
        p.ids.push_back(row_id(static_cast<int>(i)));
        for (std::size_t j = 0; j < coords[i].size(); ++j)
            p.coords(static_cast<int>(i), static_cast<int>(j)) = coords[i][j];
    }
    return p;
}

}  // namespace

TEST_CASE("standardize: two-value column becomes [-1, 1]") {
    auto m = matrix_from_columns({std::array<double, 20>{2.0}, std::array<double, 20>{4.0}});
    auto sm = standardize(m);
    CHECK(sm.data(0, 0) == doctest::Approx(-1.0));
    CHECK(sm.data(1, 0) == doctest::Approx(1.0));
    CHECK(sm.means(0) == doctest::Approx(3.0));
    CHECK(sm.stds(0) == doctest::Approx(1.0));  // population std of {2,4}
}

TEST_CASE("standardize: constant column goes to zeros with std 1") {
    auto m = matrix_from_columns({std::array<double, 20>{7.0}, std::array<double, 20>{7.0},
                                  std::array<double, 20>{7.0}});
    auto sm = standardize(m);
    for (int i = 0; i < 3; ++i) CHECK(sm.data(i, 0) == 0.0);
    CHECK(sm.stds(0) == 1.0);
    CHECK(sm.means(0) == doctest::Approx(7.0));
}

TEST_CASE("standardize: random matrix has zero mean and unit variance per column") {
    auto m = random_matrix(20, 17);
    auto sm = standardize(m);
    for (int j = 0; j < 20; ++j) {
        CHECK(std::fabs(sm.data.col(j).mean()) < 1e-12);
        const double var = sm.data.col(j).squaredNorm() / 20.0;
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("standardize needs at least two rows") {
    CHECK_THROWS_AS(standardize(matrix_from_columns({std::array<double, 20>{1.0}})),
                    TooFewRowsError);
    CHECK_THROWS_AS(standardize(FeatureMatrix{}), TooFewRowsError);
}

TEST_CASE("pca: collinear data explains everything with one component") {
    // rows on a line in feature space
    std::vector<std::array<double, 20>> rows;
    for (int i = 0; i < 6; ++i) {
        std::array<double, 20> r{};
        for (int j = 0; j < 20; ++j) r[j] = (j + 1) * i;  // x_j = (j+1)*t
        rows.push_back(r);
    }
    auto sm = standardize(matrix_from_columns(rows));
    auto p = pca(sm, 2);
    CHECK(p.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.explained_variance_ratio(1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("pca: planted 2-D structure is preserved") {
    // two informative columns, the rest constant; scores must reproduce the
    // 2-D data up to rotation/sign (pairwise distances preserved)
    Rng rng(2718);
    std::vector<std::array<double, 20>> rows;
    for (int i = 0; i < 15; ++i) {
        std::array<double, 20> r{};
        r[0] = rng.next_double() * 4.0 - 2.0;
        r[1] = rng.next_double() * 4.0 - 2.0;
        rows.push_back(r);
    }
    auto m = matrix_from_columns(rows);
    auto sm = standardize(m);
    auto p = pca(sm, 2);
    CHECK(p.explained_variance_ratio(0) + p.explained_variance_ratio(1) ==
          doctest::Approx(1.0).epsilon(1e-9));
    for (int i = 0; i < 15; ++i)
        for (int j = i + 1; j < 15; ++j) {
            const double d_scores = (p.scores.row(i) - p.scores.row(j)).norm();
            const double d_data = (sm.data.row(i) - sm.data.row(j)).norm();
            CHECK(d_scores == doctest::Approx(d_data).epsilon(1e-8));
        }
}

TEST_CASE("pca matches the rotation-method eigensolver") {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        auto m = random_matrix(20, seed);
        auto sm = standardize(m);
        auto p = pca(sm, 3);

        const int n = static_cast<int>(sm.data.rows());
        const int d = static_cast<int>(sm.data.cols());
        std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += sm.data(i, a) * sm.data(i, b);
                cov[a][b] = s / (n - 1);
            }
        std::vector<double> evals;
        std::vector<std::vector<double>> evecs;
        oracle::jacobi_eigen(cov, evals, evecs);  // ascending

        double total = 0.0;
        for (double v : evals) total += std::max(v, 0.0);
        for (int c = 0; c < 3; ++c) {
            const int src = d - 1 - c;
            CHECK(p.explained_variance_ratio(c) ==
                  doctest::Approx(std::max(evals[src], 0.0) / total).epsilon(1e-8));
            // compare loadings up to sign
            double dot = 0.0;
            for (int j = 0; j < d; ++j) dot += p.components(j, c) * evecs[j][src];
            const double sign = dot >= 0 ? 1.0 : -1.0;
            for (int j = 0; j < d; ++j) {
                CHECK(p.components(j, c) ==
                      doctest::Approx(sign * evecs[j][src]).epsilon(1e-8).scale(1.0));
            }
        }
    }
}

TEST_CASE("pca components are orthonormal and ratios are sane") {
    auto m = random_matrix(18, 404);
    auto sm = standardize(m);
    auto p = pca(sm, 4);
    for (int a = 0; a < 4; ++a) {
        CHECK(std::fabs(p.components.col(a).norm() - 1.0) < 1e-10);
        for (int b = a + 1; b < 4; ++b)
            CHECK(std::fabs(p.components.col(a).dot(p.components.col(b))) < 1e-10);
    }
    double prev = 2.0;
    for (int c = 0; c < 4; ++c) {
        CHECK(p.explained_variance_ratio(c) >= 0.0);
        CHECK(p.explained_variance_ratio(c) <= 1.0 + 1e-12);
        CHECK(p.explained_variance_ratio(c) <= prev + 1e-12);
        prev = p.explained_variance_ratio(c);
    }
    // sign convention: largest-|loading| entry positive
    for (int c = 0; c < 4; ++c) {
        int arg = 0;
        for (int j = 1; j < 20; ++j)
            if (std::fabs(p.components(j, c)) > std::fabs(p.components(arg, c))) arg = j;
        CHECK(p.components(arg, c) > 0.0);
    }
}

TEST_CASE("pca validates component counts") {
    auto sm = standardize(random_matrix(5, 1));
    CHECK_THROWS_AS(pca(sm, 0), ConfigError);
    CHECK_THROWS_AS(pca(sm, 5), ConfigError);  // > n-1
    CHECK(pca(sm, 4).components.cols() == 4);
}

TEST_CASE("kmeans recovers three tight separated triples") {
    std::vector<std::vector<double>> coords;
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    Rng rng(12);
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 3; ++i)
            coords.push_back({centers[b][0] + 0.01 * rng.next_double(),
                              centers[b][1] + 0.01 * rng.next_double()});
    auto pts = points_of(coords);
    auto a = kmeans_cluster(pts, KMeansOptions{}, 7);
    CHECK(a.k == 3);
    CHECK(a.silhouette > 0.9);
    // blobs recovered exactly: rows 0-2, 3-5, 6-8; first-appearance labels 0,1,2
    for (int i = 0; i < 9; ++i) CHECK(a.labels.at(row_id(i)) == i / 3);
}

TEST_CASE("kmeans with fixed k=2 on square corners hits the exhaustive optimum") {
    auto pts = points_of({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    KMeansOptions opts;
    opts.fixed_k = 2;
    auto a = kmeans_cluster(pts, opts, 3);
    REQUIRE(a.k == 2);

    // exhaustive: all 2^4 assignments, centroid = cluster mean
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<int> labels(4);
        for (int i = 0; i < 4; ++i) labels[i] = (mask >> i) & 1;
        int c0 = std::count(labels.begin(), labels.end(), 0);
        if (c0 == 0 || c0 == 4) continue;
        Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(2, 2);
        std::vector<int> cnt(2, 0);
        for (int i = 0; i < 4; ++i) {
            centroids.row(labels[i]) += pts.coords.row(i);
            ++cnt[labels[i]];
        }
        for (int c = 0; c < 2; ++c) centroids.row(c) /= cnt[c];
        best = std::min(best, kmeans_objective(pts.coords, labels, centroids));
    }
    std::vector<int> got_labels;
    for (int i = 0; i < 4; ++i) got_labels.push_back(a.labels.at(row_id(i)));
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(2, 2);
    std::vector<int> cnt(2, 0);
    for (int i = 0; i < 4; ++i) {
        centroids.row(got_labels[i]) += pts.coords.row(i);
        ++cnt[got_labels[i]];
    }
    for (int c = 0; c < 2; ++c) centroids.row(c) /= cnt[c];
    CHECK(kmeans_objective(pts.coords, got_labels, centroids) == doctest::Approx(best));
}

TEST_CASE("silhouette of two tight far pairs approaches one") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 0.001, 0, 100, 0, 100.001, 0;
    CHECK(silhouette_score(pts, {0, 0, 1, 1}, 2) > 0.9999);
}

TEST_CASE("singleton clusters contribute zero silhouette") {
    Eigen::MatrixXd pts(3, 1);
    pts << 0, 0.1, 50;
    const double s = silhouette_score(pts, {0, 0, 1}, 2);
    // third point is a singleton: only the first two contribute
    const double a01 = 0.1;
    const double b0 = 50.0, b1 = 49.9;
    const double expect = ((b0 - a01) / b0 + (b1 - a01) / b1) / 3.0;
    CHECK(s == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("kmeans k selection prefers smaller k on ties and needs 3 points") {
    CHECK_THROWS_AS(kmeans_cluster(points_of({{0, 0}, {1, 1}}), KMeansOptions{}, 1),
                    TooFewPointsError);
    auto pts = points_of({{0, 0}, {0.1, 0}, {10, 0}, {10.1, 0}});
    KMeansOptions opts;
    opts.fixed_k = 5;  // > n
    CHECK_THROWS_AS(kmeans_cluster(pts, opts, 1), InvalidKError);
}

TEST_CASE("kmeans labels are deterministic for a seed") {
    auto m = random_matrix(12, 31);
    auto sm = standardize(m);
    EmbeddedPoints pts{sm.channel_ids, sm.data};
    auto a = kmeans_cluster(pts, KMeansOptions{}, 5);
    auto b = kmeans_cluster(pts, KMeansOptions{}, 5);
    CHECK(a.labels == b.labels);
    CHECK(a.k == b.k);
    CHECK(a.silhouette == b.silhouette);
}

TEST_CASE("hierarchical on {0,1,10}: merge distances 1 then 9") {
    auto pts = points_of({{0}, {1}, {10}});
    auto res = hierarchical_cluster(pts, 2);
    REQUIRE(res.merges.size() == 2);  // full dendrogram; k only cuts labels
    CHECK(res.merges[0].cluster_a == 0);
    CHECK(res.merges[0].cluster_b == 1);
    CHECK(res.merges[0].distance == doctest::Approx(1.0));
    CHECK(res.merges[1].cluster_a == 2);
    CHECK(res.merges[1].cluster_b == 3);  // {0,1} got id 3 = n + 0
    CHECK(res.merges[1].distance == doctest::Approx(9.0));
    CHECK(res.assignment.labels.at(row_id(0)) == 0);
    CHECK(res.assignment.labels.at(row_id(1)) == 0);
    CHECK(res.assignment.labels.at(row_id(2)) == 1);
}

TEST_CASE("hierarchical dendrogram is complete and distances are sorted") {
    auto pts = points_of({{0}, {1}, {10}, {11}, {30}});
    auto res = hierarchical_cluster(pts, 2);
    REQUIRE(res.merges.size() == 4);  // n-1 merges regardless of the cut
    CHECK(res.merges[0].distance == doctest::Approx(1.0));
    CHECK(res.merges[1].distance == doctest::Approx(1.0));
    CHECK(res.merges[2].distance == doctest::Approx(9.0));
    CHECK(res.merges[3].distance == doctest::Approx(19.0));
    for (std::size_t i = 1; i < res.merges.size(); ++i)
        CHECK(res.merges[i].distance >= res.merges[i - 1].distance);
    // merged ids follow the n+step convention
    CHECK(res.merges[0].step == 0);
    CHECK(res.merges[0].cluster_a == 0);
    CHECK(res.merges[0].cluster_b == 1);
    CHECK(res.merges[1].cluster_a == 2);
    CHECK(res.merges[1].cluster_b == 3);
    CHECK(res.merges[2].cluster_a == 5);  // {0,1} created at step 0
    CHECK(res.merges[2].cluster_b == 6);  // {10,11} created at step 1
    CHECK(res.merges[3].cluster_a == 4);
    CHECK(res.merges[3].cluster_b == 7);
    // labels cut at k=2: {0,1,10,11} vs {30}
    CHECK(res.assignment.labels.at(row_id(0)) == 0);
    CHECK(res.assignment.labels.at(row_id(1)) == 0);
    CHECK(res.assignment.labels.at(row_id(2)) == 0);
    CHECK(res.assignment.labels.at(row_id(3)) == 0);
    CHECK(res.assignment.labels.at(row_id(4)) == 1);
}

TEST_CASE("identical points split deterministically at distance zero") {
    auto pts = points_of({{5, 5}, {5, 5}, {5, 5}});
    auto res = hierarchical_cluster(pts, 2);
    REQUIRE(res.merges.size() == 2);
    CHECK(res.merges[0].distance == 0.0);
    CHECK(res.merges[0].cluster_a == 0);  // smallest id pair wins the tie
    CHECK(res.merges[0].cluster_b == 1);
    CHECK(res.assignment.labels.at(row_id(0)) == 0);
    CHECK(res.assignment.labels.at(row_id(1)) == 0);
    CHECK(res.assignment.labels.at(row_id(2)) == 1);
    // rerun: identical output
    auto res2 = hierarchical_cluster(pts, 2);
    CHECK(res2.merges[0].cluster_a == res.merges[0].cluster_a);
    CHECK(res2.assignment.labels == res.assignment.labels);
}

TEST_CASE("hierarchical matches the naive rescanning oracle") {
    for (std::uint64_t seed : {41u, 42u, 43u}) {
        Rng rng(seed);
        std::vector<std::vector<double>> coords;
        for (int i = 0; i < 15; ++i)
            coords.push_back({rng.next_double() * 10, rng.next_double() * 10});
        auto pts = points_of(coords);
        auto expect = oracle::single_linkage(coords);
        for (int k = 2; k <= 4; ++k) {
            auto res = hierarchical_cluster(pts, k);
            REQUIRE(res.merges.size() == expect.size());  // always n-1
            for (std::size_t s = 0; s < res.merges.size(); ++s) {
                CAPTURE(seed);
                CAPTURE(k);
                CAPTURE(s);
                CHECK(res.merges[s].cluster_a == expect[s].a);
                CHECK(res.merges[s].cluster_b == expect[s].b);
                CHECK(res.merges[s].distance == doctest::Approx(expect[s].dist).epsilon(1e-12));
            }
            // cut the oracle's merge list at n-k and compare labels
            const int n = 15;
            std::vector<int> parent(2 * n - 1);
            for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
            for (int s = 0; s < n - k; ++s) {
                parent[expect[s].a] = n + s;
                parent[expect[s].b] = n + s;
            }
            auto root = [&](int v) {
                while (parent[v] != v) v = parent[v];
                return v;
            };
            std::map<int, int> remap;
            for (int i = 0; i < n; ++i) {
                auto [it, _] = remap.try_emplace(root(i), static_cast<int>(remap.size()));
                CHECK(res.assignment.labels.at(row_id(i)) == it->second);
            }
        }
    }
}

TEST_CASE("hierarchical validates k") {
    auto pts = points_of({{0}, {1}, {2}});
    CHECK_THROWS_AS(hierarchical_cluster(pts, 1), InvalidKError);
    CHECK_THROWS_AS(hierarchical_cluster(pts, 4), InvalidKError);
    CHECK_THROWS_AS(hierarchical_cluster(points_of({{0}}), 2), TooFewPointsError);
}

TEST_CASE("cluster summary of a single-channel cluster echoes its features") {
    std::vector<std::array<double, 20>> rows(3);
    rows[0][7] = 0.8;  rows[0][6] = 0.07; rows[0][8] = 0.25;   // acc/density/modularity
    rows[1][7] = 0.3;  rows[1][6] = 0.06; rows[1][8] = 0.45;
    rows[2][7] = 0.31; rows[2][6] = 0.05; rows[2][8] = 0.44;
    auto m = matrix_from_columns(rows);
    ClusterAssignment a;
    a.k = 2;
    a.labels = {{row_id(0), 0}, {row_id(1), 1}, {row_id(2), 1}};
    auto summary = cluster_summary(a, m);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].mean_acc == doctest::Approx(0.8));
    CHECK(summary[0].mean_density == doctest::Approx(0.07));
    CHECK(summary[0].mean_modularity == doctest::Approx(0.25));
    CHECK(summary[0].channels == std::vector<std::string>{row_id(0)});
    CHECK(summary[1].mean_acc == doctest::Approx((0.3 + 0.31) / 2));
    CHECK(summary[1].channels == std::vector<std::string>{row_id(1), row_id(2)});
    // comparative wording
    CHECK(summary[0].description == "high clustering, high density, low modularity");
    CHECK(summary[1].description == "low clustering, low density, high modularity");
}

TEST_CASE("cluster summary means match direct group averaging") {
    Rng rng(88);
    std::vector<std::array<double, 20>> rows(12);
    for (auto& r : rows)
        for (auto& v : r) v = rng.next_double();
    auto m = matrix_from_columns(rows);
    ClusterAssignment a;
    a.k = 3;
    for (int i = 0; i < 12; ++i) a.labels[row_id(i)] = i % 3;
    auto summary = cluster_summary(a, m);
    REQUIRE(summary.size() == 3);
    for (int c = 0; c < 3; ++c) {
        double acc = 0, den = 0, mod = 0;
        int cnt = 0;
        for (int i = 0; i < 12; ++i)
            if (i % 3 == c) {
                acc += rows[i][7];
                den += rows[i][6];
                mod += rows[i][8];
                ++cnt;
            }
        CHECK(summary[c].mean_acc == doctest::Approx(acc / cnt).epsilon(1e-12));
        CHECK(summary[c].mean_density == doctest::Approx(den / cnt).epsilon(1e-12));
        CHECK(summary[c].mean_modularity == doctest::Approx(mod / cnt).epsilon(1e-12));
        CHECK(static_cast<int>(summary[c].channels.size()) == cnt);
    }
}

TEST_CASE("agreement: identical and permuted labelings score 1") {
    ClusterAssignment a, b;
    for (int i = 0; i < 8; ++i) {
        a.labels[row_id(i)] = i % 3;
        b.labels[row_id(i)] = (i % 3 + 1) % 3;  // same partition, renamed labels
    }
    a.k = b.k = 3;
    CHECK(clustering_agreement(a, a) == doctest::Approx(1.0));
    CHECK(clustering_agreement(a, b) == doctest::Approx(1.0));
}

TEST_CASE("agreement matches the contingency formula on fixed partitions") {
    // hand-checkable example over 8 items
    ClusterAssignment a, b;
    std::vector<int> la = {0, 0, 0, 0, 1, 1, 1, 1};
    std::vector<int> lb = {0, 0, 0, 1, 1, 1, 2, 2};
    for (int i = 0; i < 8; ++i) {
        a.labels[row_id(i)] = la[i];
        b.labels[row_id(i)] = lb[i];
    }
    a.k = 2;
    b.k = 3;
    CHECK(clustering_agreement(a, b) == doctest::Approx(oracle::ari(la, lb)).epsilon(1e-12));
    // and against the numbers worked out by hand:
    //   contingency rows: [3,1,0] and [0,2,2]; sum C(n_ij,2) = 3+0+0+0+1+1 = 5
    //   sum_a = 2*C(4,2) = 12; sum_b = C(3,2)+C(3,2)+C(2,2) = 3+3+1 = 7
    //   expected = 12*7/C(8,2) = 84/28 = 3; max = (12+7)/2 = 9.5
    //   ari = (5-3)/(9.5-3) = 2/6.5
    CHECK(clustering_agreement(a, b) == doctest::Approx(2.0 / 6.5).epsilon(1e-12));
}

TEST_CASE("agreement on random labelings matches the oracle") {
    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(15));
        ClusterAssignment a, b;
        std::vector<int> la(n), lb(n);
        for (int i = 0; i < n; ++i) {
            la[i] = static_cast<int>(rng.below(4));
            lb[i] = static_cast<int>(rng.below(3));
            a.labels[row_id(i)] = la[i];
            b.labels[row_id(i)] = lb[i];
        }
        CAPTURE(trial);
        CHECK(clustering_agreement(a, b) == doctest::Approx(oracle::ari(la, lb)).epsilon(1e-12));
    }
}

TEST_CASE("agreement requires identical channel sets") {
    ClusterAssignment a, b;
    a.labels = {{"x", 0}, {"y", 1}};
    b.labels = {{"x", 0}, {"z", 1}};
    CHECK_THROWS_AS(clustering_agreement(a, b), MismatchedChannelsError);
    b.labels = {{"x", 0}};
    CHECK_THROWS_AS(clustering_agreement(a, b), MismatchedChannelsError);
}
