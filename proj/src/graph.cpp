#include "mobscope/graph.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>

#include "mobscope/csv.hpp"
#include "mobscope/errors.hpp"

namespace mobscope {

int CoCommenterGraph::index_of(const std::string& node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) return -1;
    return static_cast<int>(it - nodes.begin());
}

bool CoCommenterGraph::has_edge(int u, int v) const { return weight(u, v) != 0; }

int CoCommenterGraph::weight(int u, int v) const {
    const auto& row = adj[u];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(v, 0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it == row.end() || it->first != v) return 0;
    return it->second;
}

CoCommenterGraph CoCommenterGraph::from_edges(
    const std::vector<std::tuple<std::string, std::string, int>>& edges, int threshold) {
    std::set<std::string> node_set;
    for (const auto& [u, v, w] : edges) {
        if (u == v) throw InternalError("self-loop in co-commenter edge list: " + u);
        if (w < threshold) throw InternalError("edge weight below threshold: " + u + "," + v);
        node_set.insert(u);
        node_set.insert(v);
    }
    CoCommenterGraph g;
    g.threshold = threshold;
    g.nodes.assign(node_set.begin(), node_set.end());
    g.adj.assign(g.nodes.size(), {});
    for (const auto& [u, v, w] : edges) {
        int ui = g.index_of(u), vi = g.index_of(v);
        g.adj[ui].emplace_back(vi, w);
        g.adj[vi].emplace_back(ui, w);
    }
    for (auto& row : g.adj) {
        std::sort(row.begin(), row.end());
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i].first == row[i - 1].first)
                throw InternalError("duplicate edge in co-commenter edge list");
    }
    g.edge_count = edges.size();
    return g;
}

PairWeights compute_pair_weights(const ChannelDataset& channel) {
    // commenter sets per video, then count co-occurrences per pair
    std::unordered_map<std::string, std::set<std::string>> per_video;
    for (const auto& r : channel.records) per_video[r.video_id].insert(r.commenter_id);
    PairWeights pw;
    for (const auto& [vid, commenters] : per_video) {
        std::vector<const std::string*> cs;
        cs.reserve(commenters.size());
        for (const auto& c : commenters) cs.push_back(&c);
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = i + 1; j < cs.size(); ++j)
                ++pw.counts[{*cs[i], *cs[j]}];  // set iteration is sorted, so *cs[i] < *cs[j]
    }
    return pw;
}

CoCommenterGraph graph_at_threshold(const PairWeights& weights, int threshold) {
    if (threshold < 1) throw ConfigError("threshold", "must be >= 1");
    std::vector<std::tuple<std::string, std::string, int>> edges;
    for (const auto& [pair, w] : weights.counts)
        if (w >= threshold) edges.emplace_back(pair.first, pair.second, w);
    return CoCommenterGraph::from_edges(edges, threshold);
}

CoCommenterGraph build_cocommenter_graph(const ChannelDataset& channel, int threshold) {
    return graph_at_threshold(compute_pair_weights(channel), threshold);
}

std::vector<double> local_clustering(const CoCommenterGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<double> cc(n, 0.0);
    for (int v = 0; v < n; ++v) {
        const auto& nbrs = g.adj[v];
        const std::size_t deg = nbrs.size();
        if (deg < 2) continue;
        // count edges among neighbors via sorted-list intersection
        std::int64_t links = 0;
        for (std::size_t i = 0; i < deg; ++i) {
            const auto& row = g.adj[nbrs[i].first];
            // two-pointer intersect with nbrs[i+1..]
            std::size_t a = i + 1, b = 0;
            while (a < deg && b < row.size()) {
                if (nbrs[a].first == row[b].first) {
                    ++links;
                    ++a;
                    ++b;
                } else if (nbrs[a].first < row[b].first) {
                    ++a;
                } else {
                    ++b;
                }
            }
        }
        cc[v] = 2.0 * static_cast<double>(links) /
                (static_cast<double>(deg) * static_cast<double>(deg - 1));
    }
    return cc;
}

GraphMetrics graph_metrics(const CoCommenterGraph& g) {
    GraphMetrics m;
    m.n_nodes = static_cast<std::int64_t>(g.nodes.size());
    m.n_edges = static_cast<std::int64_t>(g.edge_count);
    if (m.n_nodes >= 2)
        m.density = 2.0 * static_cast<double>(m.n_edges) /
                    (static_cast<double>(m.n_nodes) * static_cast<double>(m.n_nodes - 1));
    if (m.n_nodes > 0) {
        m.average_degree = 2.0 * static_cast<double>(m.n_edges) / static_cast<double>(m.n_nodes);
        std::vector<double> cc = local_clustering(g);
        double s = 0.0;
        for (double c : cc) s += c;
        m.average_clustering_coefficient = s / static_cast<double>(m.n_nodes);
    }
    return m;
}

std::map<std::string, double> degree_centrality(const CoCommenterGraph& g) {
    std::map<std::string, double> out;
    const int n = static_cast<int>(g.nodes.size());
    for (int v = 0; v < n; ++v)
        out[g.nodes[v]] =
            n > 1 ? static_cast<double>(g.adj[v].size()) / static_cast<double>(n - 1) : 0.0;
    return out;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

void write_graphml(std::ostream& out, const CoCommenterGraph& g) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"w\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (const auto& node : g.nodes)
        out << "    <node id=\"" << xml_escape(node) << "\"/>\n";
    for (std::size_t v = 0; v < g.adj.size(); ++v) {
        for (const auto& [u, w] : g.adj[v]) {
            if (static_cast<std::size_t>(u) < v) continue;  // emit each edge once, u<v order
            out << "    <edge source=\"" << xml_escape(g.nodes[v]) << "\" target=\""
                << xml_escape(g.nodes[u]) << "\"><data key=\"w\">" << w << "</data></edge>\n";
        }
    }
    out << "  </graph>\n</graphml>\n";
}

void write_edge_list_csv(std::ostream& out, const CoCommenterGraph& g) {
    out << "u,v,w\n";
    for (std::size_t v = 0; v < g.adj.size(); ++v) {
        for (const auto& [u, w] : g.adj[v]) {
            if (static_cast<std::size_t>(u) < v) continue;
            out << csv_quote(g.nodes[v]) << ',' << csv_quote(g.nodes[u]) << ',' << w << '\n';
        }
    }
}

}  // namespace mobscope
