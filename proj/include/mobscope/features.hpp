#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "mobscope/cliquecomm.hpp"
#include "mobscope/graph.hpp"
#include "mobscope/ingestion.hpp"

namespace mobscope {

// The 20 per-channel structural features, fixed order. Graph-level values
// (F1, F2, F6..) are taken at the channel's chosen threshold; F3/F4 count the
// raw channel. Zero-denominator ratios are 0; a channel without cliques of
// the minimum size zeroes F11-F20; an empty graph zeroes F5-F9.
struct FeatureVector {
    double n_nodes = 0;                       // F1
    double n_edges = 0;                       // F2
    double total_unique_commenters = 0;       // F3
    double total_comments = 0;                // F4
    double cocommenter_ratio = 0;             // F5 = F1/F3
    double average_degree = 0;                // F6
    double density = 0;                       // F7
    double acc = 0;                           // F8
    double modularity_q = 0;                  // F9
    double n_cliques_ge5 = 0;                 // F10
    double n_unique_clique_commenters = 0;    // F11
    double clique_commenters_over_total = 0;  // F12 = F11/F3
    double clique_commenters_over_nodes = 0;  // F13 = F11/F1
    double clique_avg_degree = 0;             // F14 (union of clique members, degree in g)
    double clique_avg_degree_ratio = 0;       // F15 = F14/F6
    double clique_acc = 0;                    // F16 (union of clique members, local cc in g)
    double clique_acc_ratio = 0;              // F17 = F16/F8
    double mean_clique_size = 0;              // F18
    double median_clique_size = 0;            // F19
    double max_clique_size = 0;               // F20

    std::array<double, 20> as_array() const;
};

// canonical feature names, for CSV headers and report keys
extern const std::array<const char*, 20> kFeatureNames;

struct FeatureRow {
    std::string channel_id;
    int threshold = 1;
    FeatureVector features;
};

struct FeatureMatrix {
    std::vector<FeatureRow> rows;  // sorted by channel_id
};

FeatureVector extract_features(const ChannelDataset& dataset, const CoCommenterGraph& g,
                               const CliqueSet& cliques, const CommunityPartition& partition);

void write_features_csv(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_features_csv(std::istream& in);

}  // namespace mobscope
