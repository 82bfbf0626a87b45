// mobscope: co-commenter network analysis over comment corpora.
// Subcommands cover the full pipeline plus piecewise access to each stage.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobscope/cliquecomm.hpp"
#include "mobscope/errors.hpp"
#include "mobscope/features.hpp"
#include "mobscope/graph.hpp"
#include "mobscope/ingestion.hpp"
#include "mobscope/mlpipe.hpp"
#include "mobscope/mob.hpp"
#include "mobscope/pipeline.hpp"
#include "mobscope/report_json.hpp"
#include "mobscope/rng.hpp"
#include "mobscope/synthgen.hpp"
#include "mobscope/thresholding.hpp"

namespace {

using mobscope::canonical_json;
using nlohmann::json;

std::optional<mobscope::CorpusFormat> parse_format(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "jsonl") return mobscope::CorpusFormat::jsonl;
    if (s == "csv") return mobscope::CorpusFormat::csv;
    throw mobscope::ConfigError("format", "must be 'jsonl' or 'csv'");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
    if (!out) throw mobscope::InputError("cannot open for writing: " + path);
    out << content;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") std::cout << content;
    else write_file(out_path, content);
}

json stats_json(const mobscope::CorpusStats& stats) {
    json doc;
    doc["n_channels"] = stats.n_channels;
    doc["n_videos"] = stats.n_videos;
    doc["n_comments"] = stats.n_comments;
    doc["n_commenters"] = stats.n_commenters;
    json rows = json::array();
    for (const auto& ch : stats.per_channel) {
        json row;
        row["channel_id"] = ch.channel_id;
        row["videos"] = ch.videos;
        row["comments"] = ch.comments;
        row["commenters"] = ch.commenters;
        rows.push_back(std::move(row));
    }
    doc["per_channel"] = std::move(rows);
    return doc;
}

const mobscope::ChannelDataset& need_channel(const mobscope::Corpus& corpus,
                                             const std::string& id) {
    auto it = corpus.channels.find(id);
    if (it == corpus.channels.end()) throw mobscope::UnknownChannelError(id);
    return it->second;
}

int run(int argc, char** argv) {
    CLI::App app{"co-commenter network analysis"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load a corpus file and write the binary container");
    std::string in_path, format_str, out_path;
    ingest->add_option("--input", in_path, "corpus file (jsonl or csv)")->required();
    ingest->add_option("--format", format_str, "jsonl|csv (default: by extension)");
    ingest->add_option("--out", out_path, "output container path")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "corpus summary counts");
    std::string stats_in;
    bool stats_json_flag = false;
    stats_cmd->add_option("corpus", stats_in, "corpus file")->required();
    stats_cmd->add_flag("--json", stats_json_flag, "emit JSON (always on; kept for symmetry)");

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "export one channel's co-commenter graph");
    std::string graph_in, graph_channel, graph_out, graph_edges_out;
    int graph_threshold = 1;
    graph_cmd->add_option("corpus", graph_in, "corpus file")->required();
    graph_cmd->add_option("--channel", graph_channel, "channel id")->required();
    graph_cmd->add_option("--threshold", graph_threshold, "edge weight cutoff (>=1)");
    graph_cmd->add_option("--out", graph_out, "GraphML output path");
    graph_cmd->add_option("--edges-out", graph_edges_out, "edge list CSV output path");

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "sweep thresholds and pick the elbow");
    std::string thr_in, thr_channel, thr_out;
    int thr_min = 1, thr_max = 10;
    thr_cmd->add_option("corpus", thr_in, "corpus file")->required();
    thr_cmd->add_option("--channel", thr_channel, "channel id")->required();
    thr_cmd->add_option("--t-min", thr_min, "sweep start (default 1)");
    thr_cmd->add_option("--t-max", thr_max, "sweep end (default 10)");
    thr_cmd->add_option("--out", thr_out, "output path (default stdout)");

    // features
    auto* feat_cmd = app.add_subcommand("features", "per-channel feature matrix at elbow thresholds");
    std::string feat_in, feat_out;
    std::uint64_t feat_seed = 17;
    int feat_jobs = 0;
    feat_cmd->add_option("corpus", feat_in, "corpus file")->required();
    feat_cmd->add_option("--out", feat_out, "features CSV path")->required();
    feat_cmd->add_option("--seed", feat_seed, "community detection seed (default 17)");
    feat_cmd->add_option("--jobs", feat_jobs, "worker threads (default: hardware)");

    // cluster
    auto* clu_cmd = app.add_subcommand("cluster", "standardize, project, cluster a feature matrix");
    std::string clu_in, clu_out, clu_scatter, clu_space = "pca";
    std::uint64_t clu_seed = 17;
    int clu_k = 0;
    clu_cmd->add_option("features", clu_in, "features CSV from `features`")->required();
    clu_cmd->add_option("--seed", clu_seed, "clustering seed (default 17)");
    clu_cmd->add_option("--k", clu_k, "fix k for both methods (default: silhouette)");
    clu_cmd->add_option("--space", clu_space, "pca|raw clustering space (default pca)");
    clu_cmd->add_option("--out", clu_out, "JSON output path (default stdout)");
    clu_cmd->add_option("--scatter", clu_scatter, "scatter CSV path");

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "suspiciousness ranking from a feature matrix");
    std::string rank_in, rank_out;
    rank_cmd->add_option("features", rank_in, "features CSV")->required();
    rank_cmd->add_option("--out", rank_out, "output path (default stdout)");

    // mobs
    auto* mobs_cmd = app.add_subcommand("mobs", "largest communities and their leaders for a channel");
    std::string mobs_in, mobs_channel, mobs_out;
    std::uint64_t mobs_seed = 17;
    int mobs_top = 3, mobs_leaders = 10, mobs_threshold = 0;
    mobs_cmd->add_option("corpus", mobs_in, "corpus file")->required();
    mobs_cmd->add_option("--channel", mobs_channel, "channel id")->required();
    mobs_cmd->add_option("--threshold", mobs_threshold, "edge cutoff (default: elbow)");
    mobs_cmd->add_option("--top", mobs_top, "communities to keep (default 3)");
    mobs_cmd->add_option("--leaders", mobs_leaders, "leaders per community (default 10)");
    mobs_cmd->add_option("--seed", mobs_seed, "community detection seed");
    mobs_cmd->add_option("--out", mobs_out, "output path (default stdout)");

    // cross
    auto* cross_cmd = app.add_subcommand("cross", "cross-channel hub graph and bridge commenters");
    std::string cross_in, cross_channels, cross_out, cross_graphml;
    std::uint64_t cross_seed = 17;
    int cross_span = 2;
    cross_cmd->add_option("corpus", cross_in, "corpus file")->required();
    cross_cmd->add_option("--channels", cross_channels, "comma-separated channel ids (>= 2)")
        ->required();
    cross_cmd->add_option("--min-span", cross_span, "minimum channels per bridge (default 2)");
    cross_cmd->add_option("--seed", cross_seed, "community detection seed");
    cross_cmd->add_option("--out", cross_out, "output path (default stdout)");
    cross_cmd->add_option("--graphml", cross_graphml, "hub graph GraphML path");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with planted mobs");
    std::string synth_config, synth_out, synth_truth;
    synth_cmd->add_option("--config", synth_config, "SynthConfig JSON")->required();
    synth_cmd->add_option("--out", synth_out, "corpus output (.jsonl/.csv/.bin)")->required();
    synth_cmd->add_option("--truth", synth_truth, "planted ground-truth JSON path");

    // run
    auto* run_cmd = app.add_subcommand("run", "full pipeline: report JSON plus exports");
    std::string run_in, run_report = "report.json", run_features, run_scatter, run_config;
    std::uint64_t run_seed = 17;
    int run_jobs = 0, run_k = 0;
    std::string run_space;
    run_cmd->add_option("corpus", run_in, "corpus file")->required();
    run_cmd->add_option("--config", run_config, "pipeline config JSON");
    run_cmd->add_option("--report", run_report, "report path (default report.json)");
    run_cmd->add_option("--features-out", run_features, "features CSV path");
    run_cmd->add_option("--scatter-out", run_scatter, "scatter CSV path");
    run_cmd->add_option("--seed", run_seed, "master seed (default 17)");
    run_cmd->add_option("--k", run_k, "fix cluster count");
    run_cmd->add_option("--space", run_space, "pca|raw clustering space");
    run_cmd->add_option("--jobs", run_jobs, "worker threads (default: hardware)");

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) {
        mobscope::Corpus corpus = mobscope::load_corpus_any(in_path, parse_format(format_str));
        mobscope::save_corpus_bin(out_path, corpus, {{"prng", "splitmix64"}});
        const auto stats = mobscope::corpus_stats(corpus);
        std::cout << "channels " << stats.n_channels << ", videos " << stats.n_videos
                  << ", comments " << stats.n_comments << ", commenters " << stats.n_commenters
                  << "\n";
        return 0;
    }
    if (stats_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(stats_in, std::nullopt);
        std::cout << canonical_json(stats_json(mobscope::corpus_stats(corpus)));
        return 0;
    }
    if (graph_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(graph_in, std::nullopt);
        const auto g =
            mobscope::build_cocommenter_graph(need_channel(corpus, graph_channel), graph_threshold);
        if (graph_out.empty() && graph_edges_out.empty())
            throw mobscope::ConfigError("out", "need --out and/or --edges-out");
        if (!graph_out.empty()) {
            std::ofstream out(graph_out);
            if (!out) throw mobscope::InputError("cannot open for writing: " + graph_out);
            mobscope::write_graphml(out, g);
        }
        if (!graph_edges_out.empty()) {
            std::ofstream out(graph_edges_out);
            if (!out) throw mobscope::InputError("cannot open for writing: " + graph_edges_out);
            mobscope::write_edge_list_csv(out, g);
        }
        const auto m = mobscope::graph_metrics(g);
        std::cout << "nodes " << m.n_nodes << ", edges " << m.n_edges << "\n";
        return 0;
    }
    if (thr_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(thr_in, std::nullopt);
        const auto curve =
            mobscope::sweep_thresholds(need_channel(corpus, thr_channel), thr_min, thr_max);
        json doc;
        doc["channel_id"] = thr_channel;
        json pts = json::array();
        for (const auto& p : curve.points) {
            json jp;
            jp["t"] = p.threshold;
            jp["acc"] = p.avg_clustering_coeff;
            jp["n_nodes"] = p.n_nodes;
            jp["n_edges"] = p.n_edges;
            pts.push_back(std::move(jp));
        }
        doc["curve"] = std::move(pts);
        doc["elbow"] = mobscope::elbow_point(curve);
        emit(thr_out, canonical_json(doc));
        return 0;
    }
    if (feat_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(feat_in, std::nullopt);
        mobscope::PipelineConfig cfg;
        cfg.seed = feat_seed;
        cfg.jobs = feat_jobs;
        const auto report = mobscope::run_pipeline(corpus, cfg, "");
        std::ofstream out(feat_out);
        if (!out) throw mobscope::InputError("cannot open for writing: " + feat_out);
        mobscope::write_features_csv(out, report.features);
        std::cout << "wrote " << report.features.rows.size() << " channel rows\n";
        return 0;
    }
    if (clu_cmd->parsed()) {
        std::ifstream in(clu_in);
        if (!in) throw mobscope::FileNotFoundError(clu_in);
        const auto matrix = mobscope::read_features_csv(in);
        const auto sm = mobscope::standardize(matrix);
        const int n_comp = std::min<int>(2, static_cast<int>(matrix.rows.size()) - 1);
        const auto proj = mobscope::pca(sm, n_comp);
        mobscope::EmbeddedPoints pts;
        pts.ids = sm.channel_ids;
        if (clu_space == "pca") pts.coords = proj.scores;
        else if (clu_space == "raw") pts.coords = sm.data;
        else throw mobscope::ConfigError("space", "must be 'pca' or 'raw'");
        mobscope::KMeansOptions opts;
        if (clu_k > 0) opts.fixed_k = clu_k;
        const auto km = mobscope::kmeans_cluster(pts, opts, clu_seed);
        const auto hr = mobscope::hierarchical_cluster(pts, clu_k > 0 ? clu_k : km.k);
        json doc;
        json comps = json::array();
        for (int c = 0; c < proj.components.cols(); ++c) {
            json col = json::array();
            for (int r = 0; r < proj.components.rows(); ++r) col.push_back(proj.components(r, c));
            comps.push_back(std::move(col));
        }
        doc["pca_components"] = std::move(comps);
        json evr = json::array();
        for (int c = 0; c < proj.explained_variance_ratio.size(); ++c)
            evr.push_back(proj.explained_variance_ratio(c));
        doc["explained_variance_ratio"] = std::move(evr);
        json scores = json::object();
        for (std::size_t i = 0; i < proj.channel_ids.size(); ++i) {
            json pt = json::array();
            for (int c = 0; c < proj.scores.cols(); ++c)
                pt.push_back(proj.scores(static_cast<int>(i), c));
            scores[proj.channel_ids[i]] = std::move(pt);
        }
        doc["scores"] = std::move(scores);
        auto asg = [](const mobscope::ClusterAssignment& a) {
            json j;
            j["method"] = a.method == mobscope::ClusterMethod::kmeans ? "kmeans" : "hierarchical";
            j["k"] = a.k;
            j["silhouette"] = a.silhouette;
            json labels = json::object();
            for (const auto& [cid, c] : a.labels) labels[cid] = c;
            j["labels"] = std::move(labels);
            return j;
        };
        doc["kmeans"] = asg(km);
        doc["hierarchical"] = asg(hr.assignment);
        doc["agreement_ari"] = mobscope::clustering_agreement(km, hr.assignment);
        json summary = json::array();
        for (const auto& s : mobscope::cluster_summary(km, matrix)) {
            json js;
            js["cluster"] = s.cluster;
            js["acc"] = s.mean_acc;
            js["density"] = s.mean_density;
            js["modularity"] = s.mean_modularity;
            js["channels"] = s.channels;
            js["description"] = s.description;
            summary.push_back(std::move(js));
        }
        doc["summary"] = std::move(summary);
        emit(clu_out, canonical_json(doc));
        if (!clu_scatter.empty()) {
            std::ofstream sc(clu_scatter);
            if (!sc) throw mobscope::InputError("cannot open for writing: " + clu_scatter);
            sc << "channel_id,pc1,pc2,kmeans_label,hier_label\n";
            char buf[40];
            for (std::size_t i = 0; i < proj.channel_ids.size(); ++i) {
                const auto& cid = proj.channel_ids[i];
                sc << cid;
                for (int c = 0; c < 2; ++c) {
                    const double v =
                        c < proj.scores.cols() ? proj.scores(static_cast<int>(i), c) : 0.0;
                    std::snprintf(buf, sizeof(buf), "%.17g", v);
                    sc << ',' << buf;
                }
                sc << ',' << km.labels.at(cid) << ',' << hr.assignment.labels.at(cid) << '\n';
            }
        }
        return 0;
    }
    if (rank_cmd->parsed()) {
        std::ifstream in(rank_in);
        if (!in) throw mobscope::FileNotFoundError(rank_in);
        const auto ranking = mobscope::rank_suspiciousness(mobscope::read_features_csv(in));
        json rows = json::array();
        for (const auto& r : ranking.rows) {
            json jr;
            jr["channel_id"] = r.channel_id;
            jr["commenters"] = r.commenters;
            jr["comments"] = r.comments;
            jr["cliques_ge5"] = r.cliques_ge5;
            jr["rank_commenters"] = r.rank_commenters;
            jr["rank_comments"] = r.rank_comments;
            jr["rank_cliques"] = r.rank_cliques;
            jr["borda"] = r.borda;
            rows.push_back(std::move(jr));
        }
        json doc;
        doc["ranking"] = std::move(rows);
        emit(rank_out, canonical_json(doc));
        return 0;
    }
    if (mobs_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(mobs_in, std::nullopt);
        const auto& ds = need_channel(corpus, mobs_channel);
        const auto pw = mobscope::compute_pair_weights(ds);
        int t = mobs_threshold;
        if (t <= 0) t = mobscope::elbow_point(mobscope::sweep_thresholds(pw, 1, 10));
        const auto g = mobscope::graph_at_threshold(pw, t);
        const auto partition = mobscope::detect_communities(
            g, mobscope::mix_seed(mobs_seed, mobscope::fnv1a64(mobs_channel)));
        std::map<std::string, std::int64_t> counts;
        for (const auto& r : ds.records) ++counts[r.commenter_id];
        auto mr = mobscope::extract_mobs(g, partition, mobs_top, mobs_leaders, &counts);
        mr.channel_id = mobs_channel;
        json doc;
        doc["channel_id"] = mr.channel_id;
        doc["threshold"] = t;
        json comms = json::array();
        for (const auto& c : mr.communities) {
            json jc;
            jc["community"] = c.community;
            jc["size"] = static_cast<std::int64_t>(c.members.size());
            jc["members"] = c.members;
            jc["leaders"] = c.leaders;
            comms.push_back(std::move(jc));
        }
        doc["communities"] = std::move(comms);
        emit(mobs_out, canonical_json(doc));
        return 0;
    }
    if (cross_cmd->parsed()) {
        const auto corpus = mobscope::load_corpus_any(cross_in, std::nullopt);
        std::vector<std::string> ids;
        std::string cur;
        for (char c : cross_channels) {
            if (c == ',') {
                if (!cur.empty()) ids.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) ids.push_back(cur);
        const auto xg = mobscope::build_cross_channel_graph(corpus, ids);
        const auto report = mobscope::find_bridges(
            xg, cross_span, mobscope::mix_seed(cross_seed, mobscope::fnv1a64("cross")));
        json doc;
        doc["channels"] = xg.channel_ids;
        json bridges = json::array();
        for (const auto& b : report.bridges) {
            json jb;
            jb["commenter_id"] = b.commenter_id;
            jb["channels"] = b.channels;
            json counts = json::object();
            for (const auto& [cid, n] : b.comment_counts) counts[cid] = n;
            jb["comment_counts"] = std::move(counts);
            jb["total_comments"] = b.total_comments;
            bridges.push_back(std::move(jb));
        }
        doc["bridges"] = std::move(bridges);
        json part;
        part["n_communities"] = report.partition.n_communities;
        part["modularity"] = report.partition.modularity;
        doc["communities"] = std::move(part);
        emit(cross_out, canonical_json(doc));
        if (!cross_graphml.empty()) {
            std::ofstream out(cross_graphml);
            if (!out) throw mobscope::InputError("cannot open for writing: " + cross_graphml);
            mobscope::write_graphml(out, xg.graph);
        }
        return 0;
    }
    if (synth_cmd->parsed()) {
        const auto cfg = mobscope::SynthConfig::from_json_file(synth_config);
        auto [corpus, truth] = mobscope::generate(cfg);
        auto ends_with = [&](const char* suffix) {
            std::string_view p(synth_out), s(suffix);
            return p.size() >= s.size() && p.substr(p.size() - s.size()) == s;
        };
        if (ends_with(".bin") || ends_with(".cbor")) {
            mobscope::save_corpus_bin(synth_out, corpus,
                                      {{"prng", truth.prng}, {"seed", std::to_string(truth.seed)}});
        } else if (ends_with(".csv")) {
            std::ofstream out(synth_out);
            if (!out) throw mobscope::InputError("cannot open for writing: " + synth_out);
            mobscope::write_corpus_csv(out, corpus);
        } else {
            std::ofstream out(synth_out);
            if (!out) throw mobscope::InputError("cannot open for writing: " + synth_out);
            mobscope::write_corpus_jsonl(out, corpus);
        }
        if (!synth_truth.empty()) {
            std::ofstream out(synth_truth);
            if (!out) throw mobscope::InputError("cannot open for writing: " + synth_truth);
            mobscope::write_truth_json(out, truth);
        }
        const auto stats = mobscope::corpus_stats(corpus);
        std::cout << "channels " << stats.n_channels << ", videos " << stats.n_videos
                  << ", comments " << stats.n_comments << ", commenters " << stats.n_commenters
                  << "\n";
        return 0;
    }
    if (run_cmd->parsed()) {
        mobscope::PipelineConfig cfg;
        if (!run_config.empty()) cfg = mobscope::PipelineConfig::from_json_file(run_config);
        // CLI flags override config values
        if (run_cmd->count("--seed")) cfg.seed = run_seed;
        if (run_cmd->count("--jobs")) cfg.jobs = run_jobs;
        if (run_cmd->count("--k")) cfg.fixed_k = run_k;
        if (run_cmd->count("--space")) {
            if (run_space == "pca") cfg.space = mobscope::ClusterSpace::pca;
            else if (run_space == "raw") cfg.space = mobscope::ClusterSpace::raw;
            else throw mobscope::ConfigError("space", "must be 'pca' or 'raw'");
        }
        const auto corpus = mobscope::load_corpus_any(run_in, std::nullopt);
        const auto report =
            mobscope::run_pipeline(corpus, cfg, mobscope::file_checksum(run_in));
        write_file(run_report, mobscope::report_json(report));
        if (!run_features.empty()) {
            std::ofstream out(run_features);
            if (!out) throw mobscope::InputError("cannot open for writing: " + run_features);
            mobscope::write_features_csv(out, report.features);
        }
        if (!run_scatter.empty()) {
            std::ofstream out(run_scatter);
            if (!out) throw mobscope::InputError("cannot open for writing: " + run_scatter);
            mobscope::write_scatter_csv(out, report);
        }
        std::cout << "report written to " << run_report << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mobscope::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mobscope::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
