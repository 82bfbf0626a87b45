#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mobscope/graph.hpp"

namespace mobscope {

// Maximal cliques of size >= min_size. Each clique is a sorted list of node
// ids; the set itself is sorted lexicographically, so output order is
// canonical regardless of enumeration order.
struct CliqueSet {
    std::vector<std::vector<std::string>> cliques;
    int min_size = 5;
};

CliqueSet enumerate_maximal_cliques(const CoCommenterGraph& g, int min_size = 5);

// Community partition of a graph: every node maps to a community id.
// Community ids are 0..k-1, assigned by first appearance when scanning
// nodes in sorted-id order.
struct CommunityPartition {
    std::map<std::string, int> assignment;
    int n_communities = 0;
    double modularity = 0.0;
    std::uint64_t seed = 0;

    std::vector<std::vector<std::string>> groups() const;  // members sorted, by community id
};

// Weighted modularity of an assignment (resolution 1). Every graph node must
// be covered. An empty graph scores 0.
double modularity(const CoCommenterGraph& g, const std::map<std::string, int>& assignment);

// Louvain with seeded node visitation, run to a local optimum with
// aggregation rounds; a few internal restarts keep the best modularity.
CommunityPartition detect_communities(const CoCommenterGraph& g, std::uint64_t seed);

}  // namespace mobscope
