#include "mobscope/mob.hpp"

#include <algorithm>
#include <tuple>

#include "mobscope/errors.hpp"

namespace mobscope {

namespace {

// competition ranking: 1 = largest value, equal values share the smaller rank
std::vector<int> competition_ranks(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] > values[b]; });
    std::vector<int> ranks(n, 0);
    for (int pos = 0; pos < n; ++pos) {
        if (pos > 0 && values[order[pos]] == values[order[pos - 1]])
            ranks[order[pos]] = ranks[order[pos - 1]];
        else
            ranks[order[pos]] = pos + 1;
    }
    return ranks;
}

}  // namespace

SuspiciousnessRanking rank_suspiciousness(const FeatureMatrix& m) {
    const int n = static_cast<int>(m.rows.size());
    std::vector<double> commenters(n), comments(n), cliques(n);
    for (int i = 0; i < n; ++i) {
        commenters[i] = m.rows[i].features.total_unique_commenters;
        comments[i] = m.rows[i].features.total_comments;
        cliques[i] = m.rows[i].features.n_cliques_ge5;
    }
    const auto r1 = competition_ranks(commenters);
    const auto r2 = competition_ranks(comments);
    const auto r3 = competition_ranks(cliques);
    SuspiciousnessRanking out;
    for (int i = 0; i < n; ++i) {
        SuspiciousnessRow row;
        row.channel_id = m.rows[i].channel_id;
        row.commenters = commenters[i];
        row.comments = comments[i];
        row.cliques_ge5 = cliques[i];
        row.rank_commenters = r1[i];
        row.rank_comments = r2[i];
        row.rank_cliques = r3[i];
        row.borda = r1[i] + r2[i] + r3[i];
        out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const SuspiciousnessRow& a, const SuspiciousnessRow& b) {
                  if (a.borda != b.borda) return a.borda < b.borda;
                  if (a.commenters != b.commenters) return a.commenters > b.commenters;
                  return a.channel_id < b.channel_id;
              });
    return out;
}

MobReport extract_mobs(const CoCommenterGraph& g, const CommunityPartition& partition,
                       int n_communities, int n_leaders,
                       const std::map<std::string, std::int64_t>* comment_counts) {
    MobReport report;
    std::map<int, std::vector<std::string>> groups;
    for (const auto& node : g.nodes) {
        auto it = partition.assignment.find(node);
        if (it == partition.assignment.end()) throw UncoveredNodeError(node);
        groups[it->second].push_back(node);  // nodes iterated sorted
    }
    std::vector<std::pair<int, const std::vector<std::string>*>> by_size;
    for (const auto& [c, members] : groups) by_size.emplace_back(c, &members);
    std::stable_sort(by_size.begin(), by_size.end(), [](const auto& a, const auto& b) {
        return a.second->size() > b.second->size();  // stable: ties keep community-id order
    });
    const int take = std::min<int>(n_communities, static_cast<int>(by_size.size()));
    for (int i = 0; i < take; ++i) {
        MobCommunity mc;
        mc.community = by_size[i].first;
        mc.members = *by_size[i].second;
        // induced-subgraph degree per member
        const auto& members = mc.members;
        std::map<std::string, int> in_deg;
        for (const auto& node : members) in_deg[node] = 0;
        for (const auto& node : members) {
            const int vi = g.index_of(node);
            for (const auto& [u, w] : g.adj[vi])
                if (in_deg.count(g.nodes[u])) ++in_deg[node];
        }
        const double denom = members.size() > 1 ? static_cast<double>(members.size() - 1) : 1.0;
        std::vector<std::tuple<double, std::int64_t, std::string>> ranked;
        for (const auto& node : members) {
            std::int64_t cc = 0;
            if (comment_counts) {
                auto it = comment_counts->find(node);
                if (it != comment_counts->end()) cc = it->second;
            }
            ranked.emplace_back(static_cast<double>(in_deg[node]) / denom, cc, node);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
            if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
            return std::get<2>(a) < std::get<2>(b);
        });
        const int nl = std::min<int>(n_leaders, static_cast<int>(ranked.size()));
        for (int j = 0; j < nl; ++j) mc.leaders.push_back(std::get<2>(ranked[j]));
        report.communities.push_back(std::move(mc));
    }
    return report;
}

CrossChannelGraph build_cross_channel_graph(const Corpus& corpus,
                                            const std::vector<std::string>& channel_ids) {
    if (channel_ids.size() < 2) throw ConfigError("channels", "need at least 2 channel ids");
    CrossChannelGraph out;
    out.channel_ids = channel_ids;
    std::sort(out.channel_ids.begin(), out.channel_ids.end());
    out.channel_ids.erase(std::unique(out.channel_ids.begin(), out.channel_ids.end()),
                          out.channel_ids.end());
    for (const auto& cid : out.channel_ids) {
        auto it = corpus.channels.find(cid);
        if (it == corpus.channels.end()) throw UnknownChannelError(cid);
        for (const auto& r : it->second.records) {
            if (r.commenter_id.rfind("channel:", 0) == 0)
                throw InputError("commenter id collides with hub namespace: " + r.commenter_id);
            ++out.comment_counts[r.commenter_id][cid];
        }
    }
    std::vector<std::tuple<std::string, std::string, int>> edges;
    for (const auto& [commenter, per_channel] : out.comment_counts)
        for (const auto& [cid, count] : per_channel)
            edges.emplace_back(hub_node_id(cid), commenter, static_cast<int>(count));
    out.graph = CoCommenterGraph::from_edges(edges, 1);
    return out;
}

CrossChannelReport find_bridges(const CrossChannelGraph& g, int min_span, std::uint64_t seed) {
    if (min_span < 1) throw ConfigError("min_span", "must be >= 1");
    CrossChannelReport report;
    for (const auto& [commenter, per_channel] : g.comment_counts) {
        if (static_cast<int>(per_channel.size()) < min_span) continue;
        BridgeCommenter b;
        b.commenter_id = commenter;
        for (const auto& [cid, count] : per_channel) {
            b.channels.push_back(cid);
            b.comment_counts[cid] = count;
            b.total_comments += count;
        }
        report.bridges.push_back(std::move(b));
    }
    std::sort(report.bridges.begin(), report.bridges.end(),
              [](const BridgeCommenter& a, const BridgeCommenter& b) {
                  if (a.channels.size() != b.channels.size())
                      return a.channels.size() > b.channels.size();
                  if (a.total_comments != b.total_comments)
                      return a.total_comments > b.total_comments;
                  return a.commenter_id < b.commenter_id;
              });
    report.partition = detect_communities(g.graph, seed);
    return report;
}

}  // namespace mobscope
