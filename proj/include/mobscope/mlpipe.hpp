#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mobscope/features.hpp"

namespace mobscope {

// Feature matrix in numeric form: one row per channel, channel_ids aligned
// with rows, columns zero-mean unit-variance (population std). Constant
// columns become all-zeros with std recorded as 1.
struct StandardizedMatrix {
    std::vector<std::string> channel_ids;
    Eigen::MatrixXd data;   // n x d
    Eigen::VectorXd means;  // d
    Eigen::VectorXd stds;   // d
};

StandardizedMatrix standardize(const FeatureMatrix& m);

struct PCAProjection {
    Eigen::MatrixXd components;                // d x k, orthonormal columns
    Eigen::VectorXd explained_variance_ratio;  // k, non-increasing
    Eigen::MatrixXd scores;                    // n x k
    Eigen::VectorXd feature_means;             // standardization state, d
    Eigen::VectorXd feature_stds;              // d
    std::vector<std::string> channel_ids;
};

// Top eigenvectors of the 1/(n-1) covariance of the standardized data.
// Signs fixed so each component's largest-|loading| entry is positive;
// negative eigenvalues from round-off are clamped to 0.
PCAProjection pca(const StandardizedMatrix& sm, int n_components = 2);

// Points to cluster: PCA scores or standardized raw features.
struct EmbeddedPoints {
    std::vector<std::string> ids;  // aligned with rows
    Eigen::MatrixXd coords;        // n x d
};

enum class ClusterMethod { kmeans, hierarchical };

struct ClusterAssignment {
    ClusterMethod method = ClusterMethod::kmeans;
    int k = 0;
    std::map<std::string, int> labels;  // cluster ids 0..k-1 by first appearance in id order
    double silhouette = 0.0;
    std::uint64_t seed = 0;
};

struct KMeansOptions {
    int k_min = 2;
    int k_max = 8;  // capped at n-1
    int restarts = 20;
    int max_iter = 300;
    std::optional<int> fixed_k;
};

ClusterAssignment kmeans_cluster(const EmbeddedPoints& pts, const KMeansOptions& opts,
                                 std::uint64_t seed);

// scipy-style merge list: step i merges clusters a and b (originals are
// 0..n-1, the merge at step i creates id n+i) at the given distance.
struct DendrogramMerge {
    int step = 0;
    int cluster_a = 0;
    int cluster_b = 0;
    double distance = 0.0;
};

struct HierarchicalResult {
    ClusterAssignment assignment;
    std::vector<DendrogramMerge> merges;  // n-1 entries, distances non-decreasing
};

// Single-linkage agglomeration on Euclidean distances, cut at k clusters.
HierarchicalResult hierarchical_cluster(const EmbeddedPoints& pts, int k);

struct ClusterSummaryRow {
    int cluster = 0;
    double mean_acc = 0.0;
    double mean_density = 0.0;
    double mean_modularity = 0.0;
    std::vector<std::string> channels;
    std::string description;
};

std::vector<ClusterSummaryRow> cluster_summary(const ClusterAssignment& assignment,
                                               const FeatureMatrix& m);

// Adjusted Rand index between two assignments over the same channel set.
double clustering_agreement(const ClusterAssignment& a, const ClusterAssignment& b);

// Exposed for tests and k selection: mean silhouette of a labeling
// (singleton clusters score 0), and the k-means objective (sum of squared
// distances to the assigned centroid).
double silhouette_score(const Eigen::MatrixXd& pts, const std::vector<int>& labels, int k);
double kmeans_objective(const Eigen::MatrixXd& pts, const std::vector<int>& labels,
                        const Eigen::MatrixXd& centroids);

}  // namespace mobscope
