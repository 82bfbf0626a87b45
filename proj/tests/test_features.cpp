#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mobscope/errors.hpp"
#include "mobscope/features.hpp"
#include "mobscope/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace mobscope;
using testutil::dataset_from_pairs;

namespace {

// Full per-channel derivation at a threshold, as the pipeline does it.
struct Derived {
    CoCommenterGraph g;
    CliqueSet cliques;
    CommunityPartition partition;
};

Derived derive(const ChannelDataset& ds, int threshold, std::uint64_t seed = 11) {
    Derived d;
    d.g = build_cocommenter_graph(ds, threshold);
    d.cliques = enumerate_maximal_cliques(d.g, 5);
    d.partition = detect_communities(d.g, seed);
    return d;
}

ChannelDataset random_channel(int n_commenters, int n_videos, int n_comments,
                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int i = 0; i < n_comments; ++i)
        pairs.emplace_back("v" + std::to_string(rng.below(n_videos)),
                           "u" + std::to_string(rng.below(n_commenters)));
    // sprinkle a clique-ish group to exercise F10-F20 sometimes
    if (seed % 2 == 0) {
        for (int member = 0; member < 6; ++member)
            for (int vid = 0; vid < 3; ++vid)
                pairs.emplace_back("v" + std::to_string(vid),
                                   "m" + std::to_string(member));
    }
    return dataset_from_pairs("ch", pairs);
}

}  // namespace

TEST_CASE("K5 channel: every feature has its closed-form value") {
    // five commenters, one comment each, all on one video
    auto ds = dataset_from_pairs(
        "ch", {{"v", "a"}, {"v", "b"}, {"v", "c"}, {"v", "d"}, {"v", "e"}});
    auto d = derive(ds, 1);
    auto f = extract_features(ds, d.g, d.cliques, d.partition);

    CHECK(f.n_nodes == 5);
    CHECK(f.n_edges == 10);
    CHECK(f.total_unique_commenters == 5);
    CHECK(f.total_comments == 5);
    CHECK(f.cocommenter_ratio == doctest::Approx(1.0));
    CHECK(f.average_degree == doctest::Approx(4.0));
    CHECK(f.density == doctest::Approx(1.0));
    CHECK(f.acc == doctest::Approx(1.0));
    CHECK(f.modularity_q == doctest::Approx(0.0));  // one community over everything
    CHECK(f.n_cliques_ge5 == 1);
    CHECK(f.n_unique_clique_commenters == 5);
    CHECK(f.clique_commenters_over_total == doctest::Approx(1.0));
    CHECK(f.clique_commenters_over_nodes == doctest::Approx(1.0));
    CHECK(f.clique_avg_degree == doctest::Approx(4.0));
    CHECK(f.clique_avg_degree_ratio == doctest::Approx(1.0));
    CHECK(f.clique_acc == doctest::Approx(1.0));
    CHECK(f.clique_acc_ratio == doctest::Approx(1.0));
    CHECK(f.mean_clique_size == doctest::Approx(5.0));
    CHECK(f.median_clique_size == doctest::Approx(5.0));
    CHECK(f.max_clique_size == doctest::Approx(5.0));
}

TEST_CASE("no clique of size 5 zeroes the clique block") {
    auto ds = dataset_from_pairs("ch", {{"v1", "a"}, {"v1", "b"}, {"v2", "b"}, {"v2", "c"}});
    auto d = derive(ds, 1);
    auto f = extract_features(ds, d.g, d.cliques, d.partition);
    CHECK(f.n_nodes == 3);
    CHECK(f.n_cliques_ge5 == 0);
    auto arr = f.as_array();
    for (int i = 10; i < 20; ++i) CHECK(arr[i] == 0.0);
}

TEST_CASE("empty graph zeroes the graph block but keeps raw counts") {
    auto ds = dataset_from_pairs("ch", {{"v1", "a"}, {"v2", "b"}, {"v3", "c"}});
    auto d = derive(ds, 1);
    auto f = extract_features(ds, d.g, d.cliques, d.partition);
    CHECK(f.n_nodes == 0);
    CHECK(f.total_unique_commenters == 3);
    CHECK(f.total_comments == 3);
    auto arr = f.as_array();
    for (int i = 4; i < 9; ++i) CHECK(arr[i] == 0.0);   // F5-F9
    for (int i = 9; i < 20; ++i) CHECK(arr[i] == 0.0);  // no cliques either
}

TEST_CASE("features match the straight-line oracle on random channels") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto ds = random_channel(80, 50, 400, 9000 + seed);
        for (int threshold : {1, 2}) {
            auto d = derive(ds, threshold, seed);
            auto f = extract_features(ds, d.g, d.cliques, d.partition).as_array();
            std::map<std::string, int> community_of(d.partition.assignment.begin(),
                                                    d.partition.assignment.end());
            auto expect = oracle::channel_features(ds, threshold, community_of);
            CAPTURE(seed);
            CAPTURE(threshold);
            for (int i = 0; i < 20; ++i) {
                CAPTURE(i);
                CHECK(f[i] == doctest::Approx(expect[i]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("subset ratios stay inside the unit interval") {
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
        auto ds = random_channel(40, 10, 400, seed);
        auto d = derive(ds, 1, seed);
        auto f = extract_features(ds, d.g, d.cliques, d.partition);
        for (double r : {f.cocommenter_ratio, f.clique_commenters_over_total,
                         f.clique_commenters_over_nodes}) {
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
        }
    }
}

TEST_CASE("clique member missing from the graph is inconsistent input") {
    auto ds = dataset_from_pairs("ch", {{"v", "a"}, {"v", "b"}});
    auto d = derive(ds, 1);
    CliqueSet bogus;
    bogus.cliques = {{"a", "b", "ghost1", "ghost2", "ghost3"}};
    CHECK_THROWS_AS(extract_features(ds, d.g, bogus, d.partition), InconsistentInputsError);
}

TEST_CASE("features csv round trips exactly") {
    FeatureMatrix m;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto ds = random_channel(30, 8, 250, 777 + seed);
        auto d = derive(ds, 1, seed);
        FeatureRow row;
        row.channel_id = "channel, \"x\" " + std::to_string(seed);
        row.threshold = static_cast<int>(seed) + 1;
        row.features = extract_features(ds, d.g, d.cliques, d.partition);
        m.rows.push_back(std::move(row));
    }
    std::sort(m.rows.begin(), m.rows.end(),
              [](const FeatureRow& a, const FeatureRow& b) { return a.channel_id < b.channel_id; });

    std::ostringstream out;
    write_features_csv(out, m);
    std::istringstream in(out.str());
    auto back = read_features_csv(in);

    REQUIRE(back.rows.size() == m.rows.size());
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        CHECK(back.rows[i].channel_id == m.rows[i].channel_id);
        CHECK(back.rows[i].threshold == m.rows[i].threshold);
        auto a = m.rows[i].features.as_array();
        auto b = back.rows[i].features.as_array();
        for (int j = 0; j < 20; ++j) CHECK(a[j] == b[j]);  // %.17g is lossless for doubles
    }
}

TEST_CASE("features csv rejects malformed input") {
    {
        std::istringstream in("bad,header\n");
        CHECK_THROWS_AS(read_features_csv(in), ParseError);
    }
    {
        std::ostringstream header;
        header << "channel_id,threshold";
        for (const char* n : kFeatureNames) header << ',' << n;
        std::istringstream in(header.str() + "\nch,1,not_a_number\n");
        CHECK_THROWS_AS(read_features_csv(in), ParseError);
    }
}
