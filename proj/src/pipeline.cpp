#include "mobscope/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "mobscope/csv.hpp"
#include "mobscope/errors.hpp"
#include "mobscope/report_json.hpp"
#include "mobscope/rng.hpp"

namespace mobscope {

using nlohmann::json;

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid config JSON: ") + e.what());
    }
    PipelineConfig cfg;
    try {
        cfg.seed = doc.value("seed", cfg.seed);
        if (doc.contains("space")) {
            const std::string s = doc.at("space").get<std::string>();
            if (s == "pca") cfg.space = ClusterSpace::pca;
            else if (s == "raw") cfg.space = ClusterSpace::raw;
            else throw ConfigError("space", "must be 'pca' or 'raw'");
        }
        if (doc.contains("k")) cfg.fixed_k = doc.at("k").get<int>();
        cfg.n_leaders = doc.value("n_leaders", cfg.n_leaders);
        cfg.n_mob_communities = doc.value("n_mob_communities", cfg.n_mob_communities);
        cfg.min_clique_size = doc.value("min_clique_size", cfg.min_clique_size);
        cfg.t_min = doc.value("t_min", cfg.t_min);
        cfg.t_max = doc.value("t_max", cfg.t_max);
        cfg.top_channels = doc.value("top_channels", cfg.top_channels);
        cfg.min_span = doc.value("min_span", cfg.min_span);
        cfg.jobs = doc.value("jobs", cfg.jobs);
        if (doc.contains("thresholds"))
            cfg.pinned_thresholds = doc.at("thresholds").get<std::map<std::string, int>>();
    } catch (const json::exception& e) {
        throw ConfigError("pipeline config", e.what());
    }
    return cfg;
}

namespace {

void validate(const PipelineConfig& cfg) {
    if (cfg.t_min < 1 || cfg.t_max < cfg.t_min)
        throw ConfigError("t_min/t_max", "need 1 <= t_min <= t_max");
    if (cfg.t_max - cfg.t_min + 1 < 3)
        throw ConfigError("t_min/t_max", "elbow selection needs >= 3 sweep points");
    if (cfg.min_clique_size < 1) throw ConfigError("min_clique_size", "must be >= 1");
    if (cfg.n_leaders < 1) throw ConfigError("n_leaders", "must be >= 1");
    if (cfg.n_mob_communities < 1) throw ConfigError("n_mob_communities", "must be >= 1");
    if (cfg.top_channels < 1) throw ConfigError("top_channels", "must be >= 1");
    if (cfg.min_span < 1) throw ConfigError("min_span", "must be >= 1");
    if (cfg.jobs < 0) throw ConfigError("jobs", "must be >= 0");
    for (const auto& [cid, t] : cfg.pinned_thresholds)
        if (t < cfg.t_min || t > cfg.t_max)
            throw ConfigError("thresholds", cid + ": pinned threshold outside sweep range");
}

ChannelAnalysis analyze_channel(const ChannelDataset& ds, const PipelineConfig& cfg,
                                std::uint64_t master_seed) {
    ChannelAnalysis ca;
    ca.channel_id = ds.channel_id;
    const PairWeights pw = compute_pair_weights(ds);
    ca.curve = sweep_thresholds(pw, cfg.t_min, cfg.t_max);
    auto pin = cfg.pinned_thresholds.find(ds.channel_id);
    if (pin != cfg.pinned_thresholds.end()) {
        ca.threshold = pin->second;
        ca.pinned = true;
    } else {
        ca.threshold = elbow_point(ca.curve);
    }
    CoCommenterGraph g = graph_at_threshold(pw, ca.threshold);
    ca.metrics = graph_metrics(g);
    ca.cliques = enumerate_maximal_cliques(g, cfg.min_clique_size);
    ca.partition = detect_communities(g, mix_seed(master_seed, fnv1a64(ds.channel_id)));
    ca.features.channel_id = ds.channel_id;
    ca.features.threshold = ca.threshold;
    ca.features.features = extract_features(ds, g, ca.cliques, ca.partition);
    for (const auto& r : ds.records) ++ca.comment_counts[r.commenter_id];
    return ca;
}

// deterministic per-channel fan-out: results land in fixed slots, the first
// failure (by channel index) wins
std::vector<ChannelAnalysis> analyze_all(const Corpus& corpus, const PipelineConfig& cfg) {
    std::vector<const ChannelDataset*> channels;
    for (const auto& [cid, ds] : corpus.channels) channels.push_back(&ds);
    std::vector<ChannelAnalysis> out(channels.size());
    std::vector<std::exception_ptr> errors(channels.size());
    unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, std::max<std::size_t>(channels.size(), 1));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < channels.size(); ++i)
            out[i] = analyze_channel(*channels[i], cfg, cfg.seed);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= channels.size()) return;
            try {
                out[i] = analyze_channel(*channels[i], cfg, cfg.seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

bool all_zero(const FeatureVector& f) {
    for (double v : f.as_array())
        if (v != 0.0) return false;
    return true;
}

PipelineClustering cluster_stage(const FeatureMatrix& features, const PipelineConfig& cfg) {
    PipelineClustering cl;
    FeatureMatrix usable;
    for (const auto& row : features.rows) {
        if (all_zero(row.features)) cl.excluded_channels.push_back(row.channel_id);
        else usable.rows.push_back(row);
    }
    if (usable.rows.size() < 3) {
        cl.skip_reason = "fewer than 3 channels with non-zero features";
        return cl;
    }
    const StandardizedMatrix sm = standardize(usable);
    const int n_comp = std::min<int>(2, static_cast<int>(usable.rows.size()) - 1);
    cl.projection = pca(sm, n_comp);
    EmbeddedPoints pts;
    pts.ids = sm.channel_ids;
    pts.coords = cfg.space == ClusterSpace::pca ? cl.projection.scores : sm.data;
    KMeansOptions opts;
    opts.fixed_k = cfg.fixed_k;
    cl.kmeans = kmeans_cluster(pts, opts, cfg.seed);
    const int hier_k = cfg.fixed_k ? *cfg.fixed_k : cl.kmeans.k;
    HierarchicalResult hr = hierarchical_cluster(pts, hier_k);
    cl.hierarchical = hr.assignment;
    cl.dendrogram = std::move(hr.merges);
    cl.agreement = clustering_agreement(cl.kmeans, cl.hierarchical);
    cl.summary = cluster_summary(cl.kmeans, usable);
    cl.run = true;
    return cl;
}

}  // namespace

PipelineReport run_pipeline(const Corpus& corpus, const PipelineConfig& config,
                            const std::string& corpus_checksum) {
    validate(config);
    PipelineReport rep;
    rep.seed = config.seed;
    rep.corpus_checksum = corpus_checksum;
    rep.stats = corpus_stats(corpus);
    rep.channels = analyze_all(corpus, config);
    for (const auto& ca : rep.channels) rep.features.rows.push_back(ca.features);
    rep.clustering = cluster_stage(rep.features, config);
    rep.ranking = rank_suspiciousness(rep.features);

    const int top = std::min<int>(config.top_channels, static_cast<int>(rep.ranking.rows.size()));
    std::vector<std::string> top_ids;
    for (int i = 0; i < top; ++i) top_ids.push_back(rep.ranking.rows[i].channel_id);
    for (const auto& cid : top_ids) {
        const auto it = std::lower_bound(
            rep.channels.begin(), rep.channels.end(), cid,
            [](const ChannelAnalysis& a, const std::string& id) { return a.channel_id < id; });
        const ChannelAnalysis& ca = *it;
        const CoCommenterGraph g =
            build_cocommenter_graph(corpus.channels.at(cid), ca.threshold);
        MobReport mr = extract_mobs(g, ca.partition, config.n_mob_communities, config.n_leaders,
                                    &ca.comment_counts);
        mr.channel_id = cid;
        rep.mobs.push_back(std::move(mr));
    }
    if (top_ids.size() >= 2) {
        std::vector<std::string> cross_ids = top_ids;
        std::sort(cross_ids.begin(), cross_ids.end());
        rep.cross_channels = cross_ids;
        const CrossChannelGraph xg = build_cross_channel_graph(corpus, cross_ids);
        rep.cross = find_bridges(xg, config.min_span, mix_seed(config.seed, fnv1a64("cross")));
        rep.cross_run = true;
    } else {
        rep.cross_skip_reason = "cross-channel stage needs at least 2 channels";
    }
    return rep;
}

namespace {

json metrics_json(const GraphMetrics& m) {
    json j;
    j["n_nodes"] = m.n_nodes;
    j["n_edges"] = m.n_edges;
    j["average_degree"] = m.average_degree;
    j["density"] = m.density;
    j["average_clustering_coefficient"] = m.average_clustering_coefficient;
    return j;
}

json features_json(const FeatureRow& row) {
    json j;
    j["channel_id"] = row.channel_id;
    j["threshold"] = row.threshold;
    const auto vals = row.features.as_array();
    json f;
    for (std::size_t i = 0; i < vals.size(); ++i) f[kFeatureNames[i]] = vals[i];
    j["features"] = std::move(f);
    return j;
}

json assignment_json(const ClusterAssignment& a) {
    json j;
    j["method"] = a.method == ClusterMethod::kmeans ? "kmeans" : "hierarchical";
    j["k"] = a.k;
    j["silhouette"] = a.silhouette;
    j["seed"] = a.seed;
    json labels = json::object();
    for (const auto& [cid, c] : a.labels) labels[cid] = c;
    j["labels"] = std::move(labels);
    return j;
}

json partition_json(const CommunityPartition& p) {
    json j;
    j["n_communities"] = p.n_communities;
    j["modularity"] = p.modularity;
    j["seed"] = p.seed;
    json groups = json::array();
    for (const auto& g : p.groups()) groups.push_back(g);
    j["communities"] = std::move(groups);
    return j;
}

}  // namespace

std::string report_json(const PipelineReport& rep) {
    json doc;
    doc["schema_version"] = rep.schema_version;
    doc["seed"] = rep.seed;
    doc["corpus_checksum"] = rep.corpus_checksum;

    json stats;
    stats["n_channels"] = rep.stats.n_channels;
    stats["n_videos"] = rep.stats.n_videos;
    stats["n_comments"] = rep.stats.n_comments;
    stats["n_commenters"] = rep.stats.n_commenters;
    json per_channel = json::array();
    for (const auto& ch : rep.stats.per_channel) {
        json row;
        row["channel_id"] = ch.channel_id;
        row["videos"] = ch.videos;
        row["comments"] = ch.comments;
        row["commenters"] = ch.commenters;
        per_channel.push_back(std::move(row));
    }
    stats["per_channel"] = std::move(per_channel);
    doc["stats"] = std::move(stats);

    json channels = json::array();
    for (const auto& ca : rep.channels) {
        json jc;
        jc["channel_id"] = ca.channel_id;
        jc["threshold"] = ca.threshold;
        jc["threshold_pinned"] = ca.pinned;
        json curve = json::array();
        for (const auto& p : ca.curve.points) {
            json jp;
            jp["t"] = p.threshold;
            jp["acc"] = p.avg_clustering_coeff;
            jp["n_nodes"] = p.n_nodes;
            jp["n_edges"] = p.n_edges;
            curve.push_back(std::move(jp));
        }
        jc["threshold_curve"] = std::move(curve);
        jc["metrics"] = metrics_json(ca.metrics);
        json cliques = json::array();
        for (const auto& cl : ca.cliques.cliques) cliques.push_back(cl);
        jc["cliques"] = std::move(cliques);
        jc["communities"] = partition_json(ca.partition);
        channels.push_back(std::move(jc));
    }
    doc["channels"] = std::move(channels);

    json features = json::array();
    for (const auto& row : rep.features.rows) features.push_back(features_json(row));
    doc["features"] = std::move(features);

    json clustering;
    clustering["run"] = rep.clustering.run;
    clustering["excluded_channels"] = rep.clustering.excluded_channels;
    if (!rep.clustering.run) {
        clustering["skip_reason"] = rep.clustering.skip_reason;
    } else {
        const auto& pr = rep.clustering.projection;
        json pca_j;
        json comps = json::array();
        for (int c = 0; c < pr.components.cols(); ++c) {
            json col = json::array();
            for (int r = 0; r < pr.components.rows(); ++r) col.push_back(pr.components(r, c));
            comps.push_back(std::move(col));
        }
        pca_j["components"] = std::move(comps);
        json evr = json::array();
        for (int c = 0; c < pr.explained_variance_ratio.size(); ++c)
            evr.push_back(pr.explained_variance_ratio(c));
        pca_j["explained_variance_ratio"] = std::move(evr);
        json scores = json::object();
        for (std::size_t i = 0; i < pr.channel_ids.size(); ++i) {
            json pt = json::array();
            for (int c = 0; c < pr.scores.cols(); ++c)
                pt.push_back(pr.scores(static_cast<int>(i), c));
            scores[pr.channel_ids[i]] = std::move(pt);
        }
        pca_j["scores"] = std::move(scores);
        clustering["pca"] = std::move(pca_j);
        clustering["kmeans"] = assignment_json(rep.clustering.kmeans);
        clustering["hierarchical"] = assignment_json(rep.clustering.hierarchical);
        json merges = json::array();
        for (const auto& m : rep.clustering.dendrogram) {
            json jm;
            jm["step"] = m.step;
            jm["cluster_a"] = m.cluster_a;
            jm["cluster_b"] = m.cluster_b;
            jm["distance"] = m.distance;
            merges.push_back(std::move(jm));
        }
        clustering["dendrogram"] = std::move(merges);
        clustering["agreement_ari"] = rep.clustering.agreement;
        json summary = json::array();
        for (const auto& s : rep.clustering.summary) {
            json js;
            js["cluster"] = s.cluster;
            js["acc"] = s.mean_acc;
            js["density"] = s.mean_density;
            js["modularity"] = s.mean_modularity;
            js["channels"] = s.channels;
            js["description"] = s.description;
            summary.push_back(std::move(js));
        }
        clustering["summary"] = std::move(summary);
    }
    doc["clustering"] = std::move(clustering);

    json ranking = json::array();
    for (const auto& r : rep.ranking.rows) {
        json jr;
        jr["channel_id"] = r.channel_id;
        jr["commenters"] = r.commenters;
        jr["comments"] = r.comments;
        jr["cliques_ge5"] = r.cliques_ge5;
        jr["rank_commenters"] = r.rank_commenters;
        jr["rank_comments"] = r.rank_comments;
        jr["rank_cliques"] = r.rank_cliques;
        jr["borda"] = r.borda;
        ranking.push_back(std::move(jr));
    }
    doc["ranking"] = std::move(ranking);

    json mobs = json::array();
    for (const auto& mr : rep.mobs) {
        json jm;
        jm["channel_id"] = mr.channel_id;
        json comms = json::array();
        for (const auto& c : mr.communities) {
            json jc;
            jc["community"] = c.community;
            jc["size"] = static_cast<std::int64_t>(c.members.size());
            jc["members"] = c.members;
            jc["leaders"] = c.leaders;
            comms.push_back(std::move(jc));
        }
        jm["communities"] = std::move(comms);
        mobs.push_back(std::move(jm));
    }
    doc["mobs"] = std::move(mobs);

    json cross;
    cross["run"] = rep.cross_run;
    if (!rep.cross_run) {
        cross["skip_reason"] = rep.cross_skip_reason;
    } else {
        cross["channels"] = rep.cross_channels;
        json bridges = json::array();
        for (const auto& b : rep.cross.bridges) {
            json jb;
            jb["commenter_id"] = b.commenter_id;
            jb["channels"] = b.channels;
            json counts = json::object();
            for (const auto& [cid, n] : b.comment_counts) counts[cid] = n;
            jb["comment_counts"] = std::move(counts);
            jb["total_comments"] = b.total_comments;
            bridges.push_back(std::move(jb));
        }
        cross["bridges"] = std::move(bridges);
        cross["communities"] = partition_json(rep.cross.partition);
    }
    doc["cross_channel"] = std::move(cross);

    return canonical_json(doc);
}

void write_scatter_csv(std::ostream& out, const PipelineReport& rep) {
    out << "channel_id,pc1,pc2,kmeans_label,hier_label\n";
    if (!rep.clustering.run) return;
    const auto& pr = rep.clustering.projection;
    char buf[40];
    for (std::size_t i = 0; i < pr.channel_ids.size(); ++i) {
        const std::string& cid = pr.channel_ids[i];
        out << csv_quote(cid);
        for (int c = 0; c < 2; ++c) {
            double v = c < pr.scores.cols() ? pr.scores(static_cast<int>(i), c) : 0.0;
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << ',' << rep.clustering.kmeans.labels.at(cid) << ','
            << rep.clustering.hierarchical.labels.at(cid) << '\n';
    }
}

}  // namespace mobscope
