#pragma once

#include <vector>

#include "mobscope/graph.hpp"

namespace mobscope {

// One sweep point: the graph rebuilt with edges of weight >= t only.
struct ThresholdPoint {
    int threshold = 0;
    std::int64_t n_nodes = 0;
    std::int64_t n_edges = 0;
    double avg_clustering_coeff = 0.0;
};

struct ThresholdCurve {
    std::vector<ThresholdPoint> points;  // ascending threshold
};

ThresholdCurve sweep_thresholds(const PairWeights& weights, int t_min = 1, int t_max = 10);
ThresholdCurve sweep_thresholds(const ChannelDataset& channel, int t_min = 1, int t_max = 10);

// Elbow of the avg-clustering-vs-threshold curve: both axes are min-max
// normalized, then the point farthest (perpendicular distance) from the
// chord joining the first and last points wins. Ties and degenerate/flat
// curves resolve to the smallest threshold. Needs >= 3 points.
int elbow_point(const ThresholdCurve& curve);

}  // namespace mobscope
