#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mobscope/cliquecomm.hpp"
#include "mobscope/features.hpp"
#include "mobscope/graph.hpp"
#include "mobscope/ingestion.hpp"
#include "mobscope/mlpipe.hpp"
#include "mobscope/mob.hpp"
#include "mobscope/thresholding.hpp"

namespace mobscope {

enum class ClusterSpace { pca, raw };

struct PipelineConfig {
    std::uint64_t seed = 17;
    ClusterSpace space = ClusterSpace::pca;
    std::optional<int> fixed_k;          // forces k for both clustering methods
    int n_leaders = 10;
    int n_mob_communities = 3;
    int min_clique_size = 5;
    int t_min = 1;
    int t_max = 10;
    std::map<std::string, int> pinned_thresholds;  // per-channel overrides
    int top_channels = 3;                // channels taken into mob/cross stages
    int min_span = 2;
    int jobs = 0;  // worker threads for per-channel stages; 0 = hardware

    static PipelineConfig from_json_file(const std::string& path);
};

// Everything computed for one channel at its chosen threshold.
struct ChannelAnalysis {
    std::string channel_id;
    ThresholdCurve curve;
    int threshold = 1;       // elbow or pinned
    bool pinned = false;
    GraphMetrics metrics;    // at the chosen threshold
    CliqueSet cliques;
    CommunityPartition partition;
    FeatureRow features;
    std::map<std::string, std::int64_t> comment_counts;  // commenter -> comments on channel
};

struct PipelineClustering {
    bool run = false;
    std::string skip_reason;
    std::vector<std::string> excluded_channels;  // all-zero feature rows
    PCAProjection projection;                    // always over usable rows when run
    ClusterAssignment kmeans;
    ClusterAssignment hierarchical;
    std::vector<DendrogramMerge> dendrogram;
    double agreement = 0.0;  // ARI between the two assignments
    std::vector<ClusterSummaryRow> summary;  // over the k-means assignment
};

struct PipelineReport {
    std::string schema_version = "mobscope-report/1";
    std::uint64_t seed = 17;
    std::string corpus_checksum;
    CorpusStats stats;
    std::vector<ChannelAnalysis> channels;  // sorted by channel_id
    FeatureMatrix features;
    PipelineClustering clustering;
    SuspiciousnessRanking ranking;
    std::vector<MobReport> mobs;  // top channels by ranking
    bool cross_run = false;
    std::string cross_skip_reason;
    std::vector<std::string> cross_channels;
    CrossChannelReport cross;
};

// The full analysis: sweep + elbow -> graph -> cliques + communities ->
// features -> standardize/PCA/cluster -> rank -> mobs -> cross-channel.
PipelineReport run_pipeline(const Corpus& corpus, const PipelineConfig& config,
                            const std::string& corpus_checksum);

// Canonical JSON text of the report (byte-stable for fixed input + config).
std::string report_json(const PipelineReport& report);

// scatter.csv rows: channel_id, pc1, pc2, kmeans_label, hier_label
void write_scatter_csv(std::ostream& out, const PipelineReport& report);

}  // namespace mobscope
