#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mobscope/ingestion.hpp"

namespace mobscope {

// Undirected co-commenter graph for one channel. Nodes are commenter ids,
// an edge {u,v} carries the number of distinct videos both commented on.
// Node ids are sorted; adjacency lists hold (neighbor index, weight) sorted
// by neighbor index. Nodes with no edge at the active threshold are dropped.
struct CoCommenterGraph {
    std::vector<std::string> nodes;                      // sorted commenter ids
    std::vector<std::vector<std::pair<int, int>>> adj;   // adj[i] sorted by .first
    int threshold = 1;
    std::size_t edge_count = 0;

    int index_of(const std::string& node) const;  // -1 if absent
    bool has_edge(int u, int v) const;
    int weight(int u, int v) const;  // 0 if no edge

    // edges as (u,v,w) with u<v, sorted lexicographically by node id pair
    static CoCommenterGraph from_edges(
        const std::vector<std::tuple<std::string, std::string, int>>& edges, int threshold = 1);
};

// Shared-video counts for all commenter pairs of a channel, before any
// threshold is applied. Keyed by (u,v) with u < v.
struct PairWeights {
    std::map<std::pair<std::string, std::string>, int> counts;
};

PairWeights compute_pair_weights(const ChannelDataset& channel);
CoCommenterGraph graph_at_threshold(const PairWeights& weights, int threshold);
CoCommenterGraph build_cocommenter_graph(const ChannelDataset& channel, int threshold = 1);

struct GraphMetrics {
    std::int64_t n_nodes = 0;
    std::int64_t n_edges = 0;
    double average_degree = 0.0;                  // 2m / n; 0 when n == 0
    double density = 0.0;                         // 2m / (n(n-1)); 0 when n < 2
    double average_clustering_coefficient = 0.0;  // unweighted mean over nodes
};

GraphMetrics graph_metrics(const CoCommenterGraph& g);

// Local clustering coefficient per node (unweighted; degree < 2 gives 0).
std::vector<double> local_clustering(const CoCommenterGraph& g);

// degree / (n-1) per node id; 0 for a single-node graph.
std::map<std::string, double> degree_centrality(const CoCommenterGraph& g);

void write_graphml(std::ostream& out, const CoCommenterGraph& g);
void write_edge_list_csv(std::ostream& out, const CoCommenterGraph& g);

}  // namespace mobscope
