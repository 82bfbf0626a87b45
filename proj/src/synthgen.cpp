#include "mobscope/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "mobscope/errors.hpp"
#include "mobscope/rng.hpp"

namespace mobscope {

using nlohmann::json;

namespace {

std::string fmt(const char* pattern, long long a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, a);
    return buf;
}

std::string channel_name(int c) { return fmt("ch%03lld", c); }
std::string video_name(int c, int v) { return channel_name(c) + fmt("_v%05lld", v); }

void validate(const SynthConfig& cfg) {
    if (cfg.n_channels < 1 || cfg.n_channels > 1000)
        throw ConfigError("n_channels", "must be in [1, 1000]");
    if (cfg.videos_per_channel < 1 || cfg.videos_per_channel > 100000)
        throw ConfigError("videos_per_channel", "must be in [1, 100000]");
    if (cfg.background_commenters < 0)
        throw ConfigError("background_commenters", "must be >= 0");
    if (!(cfg.background_comment_prob >= 0.0 && cfg.background_comment_prob < 1.0))
        throw ConfigError("background_comment_prob", "must be in [0, 1)");
    for (std::size_t i = 0; i < cfg.mobs.size(); ++i) {
        const MobSpec& m = cfg.mobs[i];
        const std::string tag = "mobs[" + std::to_string(i) + "]";
        if (m.size < 2) throw ConfigError(tag + ".size", "must be >= 2");
        if (m.n_target_videos < 1) throw ConfigError(tag + ".n_target_videos", "must be >= 1");
        if (m.channels.empty()) throw ConfigError(tag + ".channels", "must list >= 1 channel");
        for (int c : m.channels)
            if (c < 0 || c >= cfg.n_channels)
                throw ConfigError(tag + ".channels", "index out of range: " + std::to_string(c));
        std::set<int> uniq(m.channels.begin(), m.channels.end());
        if (uniq.size() != m.channels.size())
            throw ConfigError(tag + ".channels", "duplicate channel index");
        if (m.leader_count < 0 || m.leader_count >= m.size)
            throw ConfigError(tag + ".leader_count", "must be in [0, size)");
        if (m.leader_boost < 0) throw ConfigError(tag + ".leader_boost", "must be >= 0");
        if (m.n_target_videos + m.leader_boost > cfg.videos_per_channel)
            throw ConfigError(tag + ".n_target_videos",
                              "targets plus leader_boost exceed videos_per_channel");
    }
}

// deterministic sample of k distinct values from [0, n) (partial Fisher-Yates)
std::vector<int> sample_without_replacement(std::vector<int>& pool, int k, Rng& rng) {
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
        const std::size_t j = static_cast<std::size_t>(i) +
                              static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace

SynthConfig SynthConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid config JSON: ") + e.what());
    }
    SynthConfig cfg;
    try {
        cfg.n_channels = doc.at("n_channels").get<int>();
        cfg.videos_per_channel = doc.at("videos_per_channel").get<int>();
        cfg.background_commenters = doc.at("background_commenters").get<int>();
        cfg.background_comment_prob = doc.at("background_comment_prob").get<double>();
        cfg.seed = doc.value("seed", 0ULL);
        for (const auto& m : doc.value("mobs", json::array())) {
            MobSpec spec;
            spec.size = m.at("size").get<int>();
            spec.n_target_videos = m.at("n_target_videos").get<int>();
            spec.channels = m.at("channels").get<std::vector<int>>();
            spec.leader_count = m.value("leader_count", 0);
            spec.leader_boost = m.value("leader_boost", 0);
            cfg.mobs.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw ConfigError("synth config", e.what());
    }
    return cfg;
}

std::pair<Corpus, PlantedTruth> generate(const SynthConfig& config) {
    validate(config);
    Rng rng(config.seed);
    std::vector<CommentRecord> records;
    long long next_comment = 0;
    auto add = [&](int channel, const std::string& video, const std::string& commenter) {
        CommentRecord r;
        r.channel_id = channel_name(channel);
        r.video_id = video;
        r.commenter_id = commenter;
        r.comment_id = fmt("c%010lld", next_comment++);
        records.push_back(std::move(r));
    };

    // background: per channel, per video, each commenter flips one coin
    for (int c = 0; c < config.n_channels; ++c) {
        for (int v = 0; v < config.videos_per_channel; ++v) {
            const std::string video = video_name(c, v);
            for (int b = 0; b < config.background_commenters; ++b) {
                if (rng.next_double() < config.background_comment_prob)
                    add(c, video, fmt("bg%06lld", b));
            }
        }
    }

    PlantedTruth truth;
    truth.seed = config.seed;
    for (std::size_t mi = 0; mi < config.mobs.size(); ++mi) {
        const MobSpec& spec = config.mobs[mi];
        PlantedMob mob;
        for (int j = 0; j < spec.size; ++j)
            mob.members.push_back(fmt("mob%03lld", static_cast<long long>(mi)) +
                                  fmt("_m%04lld", j));
        for (int j = 0; j < spec.leader_count; ++j) mob.leaders.push_back(mob.members[j]);
        std::vector<int> channels = spec.channels;
        std::sort(channels.begin(), channels.end());
        for (int c : channels) {
            const std::string cname = channel_name(c);
            mob.channels.push_back(cname);
            std::vector<int> pool(config.videos_per_channel);
            for (int v = 0; v < config.videos_per_channel; ++v) pool[v] = v;
            std::vector<int> targets = sample_without_replacement(pool, spec.n_target_videos, rng);
            std::sort(targets.begin(), targets.end());
            for (int v : targets) mob.target_videos[cname].push_back(video_name(c, v));
            for (int j = 0; j < spec.size; ++j)
                for (int v : targets) add(c, video_name(c, v), mob.members[j]);
            // leaders: extra videos drawn from the remainder of the pool
            for (int j = 0; j < spec.leader_count; ++j) {
                std::vector<int> rest(pool.begin() + spec.n_target_videos, pool.end());
                std::vector<int> extra = sample_without_replacement(rest, spec.leader_boost, rng);
                std::sort(extra.begin(), extra.end());
                for (int v : extra) add(c, video_name(c, v), mob.members[j]);
            }
        }
        truth.mobs.push_back(std::move(mob));
    }
    return {corpus_from_records(std::move(records)), std::move(truth)};
}

void write_truth_json(std::ostream& out, const PlantedTruth& truth) {
    json doc;
    doc["prng"] = truth.prng;
    doc["seed"] = truth.seed;
    json mobs = json::array();
    for (const auto& m : truth.mobs) {
        json jm;
        jm["members"] = m.members;
        jm["leaders"] = m.leaders;
        jm["channels"] = m.channels;
        jm["target_videos"] = m.target_videos;
        mobs.push_back(std::move(jm));
    }
    doc["mobs"] = std::move(mobs);
    out << doc.dump(2) << '\n';
}

std::vector<MobScore> score_detection(const std::vector<std::vector<std::string>>& units,
                                      const PlantedTruth& truth) {
    std::vector<std::set<std::string>> mob_sets;
    for (const auto& m : truth.mobs) mob_sets.emplace_back(m.members.begin(), m.members.end());
    std::vector<std::set<std::string>> detected(truth.mobs.size());
    for (const auto& unit : units) {
        std::size_t best_mob = 0;
        std::size_t best_overlap = 0;
        for (std::size_t i = 0; i < mob_sets.size(); ++i) {
            std::size_t overlap = 0;
            for (const auto& id : unit)
                if (mob_sets[i].count(id)) ++overlap;
            if (overlap > best_overlap) {  // ties keep the earliest mob
                best_overlap = overlap;
                best_mob = i;
            }
        }
        if (best_overlap > 0) detected[best_mob].insert(unit.begin(), unit.end());
    }
    std::vector<MobScore> scores(truth.mobs.size());
    for (std::size_t i = 0; i < truth.mobs.size(); ++i) {
        std::size_t hit = 0;
        for (const auto& id : detected[i])
            if (mob_sets[i].count(id)) ++hit;
        scores[i].recall = mob_sets[i].empty()
                               ? 0.0
                               : static_cast<double>(hit) / static_cast<double>(mob_sets[i].size());
        scores[i].precision = detected[i].empty()
                                  ? 0.0
                                  : static_cast<double>(hit) /
                                        static_cast<double>(detected[i].size());
    }
    return scores;
}

std::vector<std::vector<std::string>> detection_units(const CliqueSet& cliques) {
    return cliques.cliques;
}

std::vector<std::vector<std::string>> detection_units(const MobReport& report) {
    std::vector<std::vector<std::string>> units;
    for (const auto& c : report.communities) units.push_back(c.members);
    return units;
}

std::vector<std::vector<std::string>> detection_units(const CrossChannelReport& report) {
    std::vector<std::vector<std::string>> units;
    for (const auto& b : report.bridges) units.push_back({b.commenter_id});
    return units;
}

}  // namespace mobscope
