#include "mobscope/features.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "mobscope/csv.hpp"
#include "mobscope/errors.hpp"

namespace mobscope {

const std::array<const char*, 20> kFeatureNames = {
    "n_nodes",
    "n_edges",
    "total_unique_commenters",
    "total_comments",
    "cocommenter_ratio",
    "average_degree",
    "density",
    "acc",
    "modularity_q",
    "n_cliques_ge5",
    "n_unique_clique_commenters",
    "clique_commenters_over_total",
    "clique_commenters_over_nodes",
    "clique_avg_degree",
    "clique_avg_degree_ratio",
    "clique_acc",
    "clique_acc_ratio",
    "mean_clique_size",
    "median_clique_size",
    "max_clique_size",
};

std::array<double, 20> FeatureVector::as_array() const {
    return {n_nodes,
            n_edges,
            total_unique_commenters,
            total_comments,
            cocommenter_ratio,
            average_degree,
            density,
            acc,
            modularity_q,
            n_cliques_ge5,
            n_unique_clique_commenters,
            clique_commenters_over_total,
            clique_commenters_over_nodes,
            clique_avg_degree,
            clique_avg_degree_ratio,
            clique_acc,
            clique_acc_ratio,
            mean_clique_size,
            median_clique_size,
            max_clique_size};
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

FeatureVector extract_features(const ChannelDataset& dataset, const CoCommenterGraph& g,
                               const CliqueSet& cliques, const CommunityPartition& partition) {
    FeatureVector f;
    const GraphMetrics gm = graph_metrics(g);
    f.n_nodes = static_cast<double>(gm.n_nodes);
    f.n_edges = static_cast<double>(gm.n_edges);
    std::set<std::string> commenters;
    for (const auto& r : dataset.records) commenters.insert(r.commenter_id);
    f.total_unique_commenters = static_cast<double>(commenters.size());
    f.total_comments = static_cast<double>(dataset.records.size());
    if (gm.n_nodes > 0) {
        f.cocommenter_ratio = ratio(f.n_nodes, f.total_unique_commenters);
        f.average_degree = gm.average_degree;
        f.density = gm.density;
        f.acc = gm.average_clustering_coefficient;
        f.modularity_q = modularity(g, partition.assignment);
    }
    if (cliques.cliques.empty()) return f;

    f.n_cliques_ge5 = static_cast<double>(cliques.cliques.size());
    std::set<std::string> members;
    for (const auto& c : cliques.cliques) members.insert(c.begin(), c.end());
    f.n_unique_clique_commenters = static_cast<double>(members.size());
    f.clique_commenters_over_total = ratio(f.n_unique_clique_commenters, f.total_unique_commenters);
    f.clique_commenters_over_nodes = ratio(f.n_unique_clique_commenters, f.n_nodes);

    const std::vector<double> cc = local_clustering(g);
    double deg_sum = 0.0, cc_sum = 0.0;
    for (const auto& node : members) {
        const int idx = g.index_of(node);
        if (idx < 0) throw InconsistentInputsError("clique member not in graph: " + node);
        deg_sum += static_cast<double>(g.adj[idx].size());
        cc_sum += cc[idx];
    }
    f.clique_avg_degree = ratio(deg_sum, f.n_unique_clique_commenters);
    f.clique_avg_degree_ratio = ratio(f.clique_avg_degree, f.average_degree);
    f.clique_acc = ratio(cc_sum, f.n_unique_clique_commenters);
    f.clique_acc_ratio = ratio(f.clique_acc, f.acc);

    std::vector<std::size_t> sizes;
    sizes.reserve(cliques.cliques.size());
    for (const auto& c : cliques.cliques) sizes.push_back(c.size());
    std::sort(sizes.begin(), sizes.end());
    double size_sum = 0.0;
    for (auto s : sizes) size_sum += static_cast<double>(s);
    f.mean_clique_size = size_sum / static_cast<double>(sizes.size());
    const std::size_t mid = sizes.size() / 2;
    f.median_clique_size = sizes.size() % 2 == 1
                               ? static_cast<double>(sizes[mid])
                               : (static_cast<double>(sizes[mid - 1]) + static_cast<double>(sizes[mid])) / 2.0;
    f.max_clique_size = static_cast<double>(sizes.back());
    return f;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& m) {
    out << "channel_id,threshold";
    for (const char* name : kFeatureNames) out << ',' << name;
    out << '\n';
    char buf[40];
    for (const auto& row : m.rows) {
        out << csv_quote(row.channel_id) << ',' << row.threshold;
        for (double v : row.features.as_array()) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

FeatureMatrix read_features_csv(std::istream& in) {
    FeatureMatrix m;
    std::vector<std::string> fields;
    std::size_t line_no = 1;
    if (!read_csv_row(in, fields, line_no)) throw ParseError(1, "missing features header");
    {
        std::ostringstream expect;
        expect << "channel_id,threshold";
        for (const char* name : kFeatureNames) expect << ',' << name;
        std::ostringstream got;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) got << ',';
            got << fields[i];
        }
        if (got.str() != expect.str()) throw ParseError(1, "unexpected features header");
    }
    std::size_t row_no = 1;
    while (read_csv_row(in, fields, line_no)) {
        ++row_no;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 22)
            throw ParseError(row_no, "expected 22 fields, got " + std::to_string(fields.size()));
        FeatureRow row;
        row.channel_id = fields[0];
        try {
            row.threshold = std::stoi(fields[1]);
            std::array<double, 20> vals{};
            for (int i = 0; i < 20; ++i) vals[i] = std::stod(fields[2 + i]);
            FeatureVector& f = row.features;
            f.n_nodes = vals[0];
            f.n_edges = vals[1];
            f.total_unique_commenters = vals[2];
            f.total_comments = vals[3];
            f.cocommenter_ratio = vals[4];
            f.average_degree = vals[5];
            f.density = vals[6];
            f.acc = vals[7];
            f.modularity_q = vals[8];
            f.n_cliques_ge5 = vals[9];
            f.n_unique_clique_commenters = vals[10];
            f.clique_commenters_over_total = vals[11];
            f.clique_commenters_over_nodes = vals[12];
            f.clique_avg_degree = vals[13];
            f.clique_avg_degree_ratio = vals[14];
            f.clique_acc = vals[15];
            f.clique_acc_ratio = vals[16];
            f.mean_clique_size = vals[17];
            f.median_clique_size = vals[18];
            f.max_clique_size = vals[19];
        } catch (const std::exception&) {
            throw ParseError(row_no, "bad numeric field");
        }
        m.rows.push_back(std::move(row));
    }
    std::sort(m.rows.begin(), m.rows.end(),
              [](const FeatureRow& a, const FeatureRow& b) { return a.channel_id < b.channel_id; });
    return m;
}

}  // namespace mobscope
