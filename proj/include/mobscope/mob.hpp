#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mobscope/cliquecomm.hpp"
#include "mobscope/features.hpp"
#include "mobscope/graph.hpp"
#include "mobscope/ingestion.hpp"

namespace mobscope {

// Channel suspiciousness via rank aggregation over commenter count, comment
// count and clique count. Competition ranking (1 = largest, ties share the
// smaller rank); lower borda = more suspicious.
struct SuspiciousnessRow {
    std::string channel_id;
    double commenters = 0;  // F3
    double comments = 0;    // F4
    double cliques_ge5 = 0; // F10
    int rank_commenters = 0;
    int rank_comments = 0;
    int rank_cliques = 0;
    int borda = 0;
};

struct SuspiciousnessRanking {
    std::vector<SuspiciousnessRow> rows;  // ascending borda
};

SuspiciousnessRanking rank_suspiciousness(const FeatureMatrix& m);

struct MobCommunity {
    int community = 0;  // id in the source partition
    std::vector<std::string> members;  // sorted
    std::vector<std::string> leaders;  // by centrality in the induced subgraph
};

struct MobReport {
    std::string channel_id;
    std::vector<MobCommunity> communities;  // sizes non-increasing
};

// Top communities by size with their leaders. Leaders are ranked by degree
// centrality on the community's induced subgraph; comment_counts (per
// commenter, optional) breaks centrality ties, then the id does.
MobReport extract_mobs(const CoCommenterGraph& g, const CommunityPartition& partition,
                       int n_communities = 3, int n_leaders = 10,
                       const std::map<std::string, std::int64_t>* comment_counts = nullptr);

// Bipartite hub graph over a set of channels: one hub node per channel
// (id "channel:<id>"), one node per commenter, hub-commenter edge weight =
// that commenter's comment count on the channel.
struct CrossChannelGraph {
    std::vector<std::string> channel_ids;                 // sorted
    CoCommenterGraph graph;                               // hubs + commenters
    std::map<std::string, std::map<std::string, std::int64_t>> comment_counts;
    // commenter -> channel -> count
};

CrossChannelGraph build_cross_channel_graph(const Corpus& corpus,
                                            const std::vector<std::string>& channel_ids);

struct BridgeCommenter {
    std::string commenter_id;
    std::vector<std::string> channels;  // sorted; size >= min_span
    std::map<std::string, std::int64_t> comment_counts;  // per channel
    std::int64_t total_comments = 0;
};

struct CrossChannelReport {
    std::vector<BridgeCommenter> bridges;  // (span desc, total desc, id asc)
    CommunityPartition partition;          // communities of the combined graph
};

CrossChannelReport find_bridges(const CrossChannelGraph& g, int min_span = 2,
                                std::uint64_t seed = 0);

inline std::string hub_node_id(const std::string& channel_id) { return "channel:" + channel_id; }

}  // namespace mobscope
