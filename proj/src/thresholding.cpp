#include "mobscope/thresholding.hpp"

#include <cmath>

#include "mobscope/errors.hpp"

namespace mobscope {

ThresholdCurve sweep_thresholds(const PairWeights& weights, int t_min, int t_max) {
    if (t_min < 1 || t_max < t_min) throw ConfigError("threshold range", "need 1 <= t_min <= t_max");
    ThresholdCurve curve;
    for (int t = t_min; t <= t_max; ++t) {
        CoCommenterGraph g = graph_at_threshold(weights, t);
        GraphMetrics m = graph_metrics(g);
        ThresholdPoint p;
        p.threshold = t;
        p.n_nodes = m.n_nodes;
        p.n_edges = m.n_edges;
        p.avg_clustering_coeff = m.average_clustering_coefficient;
        curve.points.push_back(p);
    }
    return curve;
}

ThresholdCurve sweep_thresholds(const ChannelDataset& channel, int t_min, int t_max) {
    return sweep_thresholds(compute_pair_weights(channel), t_min, t_max);
}

int elbow_point(const ThresholdCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw TooFewPointsError(static_cast<int>(pts.size()));
    double t_lo = pts.front().threshold, t_hi = pts.back().threshold;
    double a_lo = pts.front().avg_clustering_coeff, a_hi = a_lo;
    for (const auto& p : pts) {
        a_lo = std::min(a_lo, p.avg_clustering_coeff);
        a_hi = std::max(a_hi, p.avg_clustering_coeff);
    }
    if (a_hi - a_lo == 0.0) return pts.front().threshold;  // flat curve: no elbow
    auto norm_t = [&](double t) { return (t - t_lo) / (t_hi - t_lo); };
    auto norm_a = [&](double a) { return (a - a_lo) / (a_hi - a_lo); };
    // chord from first to last normalized point
    const double x0 = norm_t(pts.front().threshold), y0 = norm_a(pts.front().avg_clustering_coeff);
    const double x1 = norm_t(pts.back().threshold), y1 = norm_a(pts.back().avg_clustering_coeff);
    const double dx = x1 - x0, dy = y1 - y0;
    const double len = std::sqrt(dx * dx + dy * dy);
    int best_t = pts.front().threshold;
    double best_d = 0.0;
    for (const auto& p : pts) {
        const double px = norm_t(p.threshold), py = norm_a(p.avg_clustering_coeff);
        const double d = std::abs(dy * (px - x0) - dx * (py - y0)) / len;
        if (d > best_d + 1e-12) {  // strict improvement; ties keep the smaller threshold
            best_d = d;
            best_t = p.threshold;
        }
    }
    if (best_d <= 1e-12) return pts.front().threshold;  // collinear curve
    return best_t;
}

}  // namespace mobscope
