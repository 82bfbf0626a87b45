#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mobscope/cliquecomm.hpp"
#include "mobscope/ingestion.hpp"
#include "mobscope/mob.hpp"

namespace mobscope {

// One planted mob: `size` commenters who all comment on `n_target_videos`
// videos of every channel in `channels` (channel indices into the generated
// corpus). The first `leader_count` members are leaders and additionally hit
// `leader_boost` extra non-target videos on each of those channels.
struct MobSpec {
    int size = 0;
    int n_target_videos = 1;
    std::vector<int> channels;  // >= 1 entries, each in [0, n_channels)
    int leader_count = 0;       // < size
    int leader_boost = 0;
};

struct SynthConfig {
    int n_channels = 1;
    int videos_per_channel = 1;
    int background_commenters = 0;
    double background_comment_prob = 0.0;  // in [0, 1)
    std::vector<MobSpec> mobs;
    std::uint64_t seed = 0;

    static SynthConfig from_json_file(const std::string& path);
};

struct PlantedMob {
    std::vector<std::string> members;  // sorted
    std::vector<std::string> leaders;  // sorted, subset of members
    std::map<std::string, std::vector<std::string>> target_videos;  // channel -> videos
    std::vector<std::string> channels;                              // sorted
};

struct PlantedTruth {
    std::vector<PlantedMob> mobs;
    std::string prng = "splitmix64";
    std::uint64_t seed = 0;
};

std::pair<Corpus, PlantedTruth> generate(const SynthConfig& config);

void write_truth_json(std::ostream& out, const PlantedTruth& truth);

struct MobScore {
    double recall = 0.0;
    double precision = 0.0;
};

// Each detected unit (a set of commenter ids) is assigned to the planted mob
// with the largest member overlap (ties toward the earlier mob; zero overlap
// leaves the unit unmatched). Per mob, detected = union of its matched
// units; recall/precision follow. No detected members at all -> 0/0 scores.
std::vector<MobScore> score_detection(const std::vector<std::vector<std::string>>& units,
                                      const PlantedTruth& truth);

// Adapters for the detector outputs.
std::vector<std::vector<std::string>> detection_units(const CliqueSet& cliques);
std::vector<std::vector<std::string>> detection_units(const MobReport& report);
std::vector<std::vector<std::string>> detection_units(const CrossChannelReport& report);

}  // namespace mobscope
