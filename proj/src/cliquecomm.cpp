#include "mobscope/cliquecomm.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mobscope/errors.hpp"
#include "mobscope/rng.hpp"

namespace mobscope {

namespace {

// index-space view of the graph for the clique search
struct CliqueSearch {
    const CoCommenterGraph& g;
    std::vector<std::vector<int>> nbrs;  // sorted neighbor indices
    std::vector<std::vector<std::string>>& out;
    int min_size;
    std::vector<int> rstack;

    CliqueSearch(const CoCommenterGraph& graph, std::vector<std::vector<std::string>>& sink,
                 int min_sz)
        : g(graph), out(sink), min_size(min_sz) {
        nbrs.resize(g.nodes.size());
        for (std::size_t v = 0; v < g.adj.size(); ++v) {
            nbrs[v].reserve(g.adj[v].size());
            for (const auto& [u, w] : g.adj[v]) nbrs[v].push_back(u);
        }
    }

    bool connected(int u, int v) const {
        const auto& row = nbrs[u];
        return std::binary_search(row.begin(), row.end(), v);
    }

    // Bron-Kerbosch with Tomita-style pivoting. P and X are sorted vectors.
    void expand(std::vector<int>& P, std::vector<int>& X) {
        if (P.empty() && X.empty()) {
            if (static_cast<int>(rstack.size()) >= min_size) {
                std::vector<std::string> clique;
                clique.reserve(rstack.size());
                for (int v : rstack) clique.push_back(g.nodes[v]);
                std::sort(clique.begin(), clique.end());
                out.push_back(std::move(clique));
            }
            return;
        }
        // pivot: vertex of P ∪ X with most neighbors in P
        int pivot = -1;
        std::size_t best = 0;
        auto consider = [&](int u) {
            std::size_t cnt = 0;
            for (int v : P)
                if (connected(u, v)) ++cnt;
            if (pivot < 0 || cnt > best) {
                pivot = u;
                best = cnt;
            }
        };
        for (int u : P) consider(u);
        for (int u : X) consider(u);
        std::vector<int> candidates;
        for (int v : P)
            if (!connected(pivot, v)) candidates.push_back(v);
        for (int v : candidates) {
            std::vector<int> P2, X2;
            for (int u : P)
                if (connected(v, u)) P2.push_back(u);
            for (int u : X)
                if (connected(v, u)) X2.push_back(u);
            rstack.push_back(v);
            expand(P2, X2);
            rstack.pop_back();
            P.erase(std::find(P.begin(), P.end(), v));
            X.insert(std::lower_bound(X.begin(), X.end(), v), v);
        }
    }
};

// degeneracy order: repeatedly remove a min-degree vertex, ties by index
std::vector<int> degeneracy_order(const std::vector<std::vector<int>>& nbrs) {
    const int n = static_cast<int>(nbrs.size());
    std::vector<int> deg(n);
    std::set<std::pair<int, int>> live;  // (degree, vertex)
    for (int v = 0; v < n; ++v) {
        deg[v] = static_cast<int>(nbrs[v].size());
        live.insert({deg[v], v});
    }
    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> removed(n, false);
    while (!live.empty()) {
        const int v = live.begin()->second;
        live.erase(live.begin());
        removed[v] = true;
        order.push_back(v);
        for (int u : nbrs[v]) {
            if (removed[u]) continue;
            live.erase({deg[u], u});
            live.insert({--deg[u], u});
        }
    }
    return order;
}

}  // namespace

CliqueSet enumerate_maximal_cliques(const CoCommenterGraph& g, int min_size) {
    if (min_size < 1) throw ConfigError("min_size", "must be >= 1");
    CliqueSet cs;
    cs.min_size = min_size;
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0) return cs;
    CliqueSearch search(g, cs.cliques, min_size);
    std::vector<int> order = degeneracy_order(search.nbrs);
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[order[i]] = i;
    for (int v : order) {
        std::vector<int> P, X;
        for (int u : search.nbrs[v]) {
            if (rank[u] > rank[v]) P.push_back(u);
            else X.push_back(u);
        }
        std::sort(P.begin(), P.end());
        std::sort(X.begin(), X.end());
        search.rstack.push_back(v);
        search.expand(P, X);
        search.rstack.pop_back();
    }
    std::sort(cs.cliques.begin(), cs.cliques.end());
    return cs;
}

std::vector<std::vector<std::string>> CommunityPartition::groups() const {
    std::vector<std::vector<std::string>> out(n_communities);
    for (const auto& [node, c] : assignment) out[c].push_back(node);  // map order = sorted
    return out;
}

double modularity(const CoCommenterGraph& g, const std::map<std::string, int>& assignment) {
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0) return 0.0;
    std::vector<int> comm(n, -1);
    int max_c = -1;
    for (int v = 0; v < n; ++v) {
        auto it = assignment.find(g.nodes[v]);
        if (it == assignment.end()) throw UncoveredNodeError(g.nodes[v]);
        if (it->second < 0) throw InternalError("negative community id");
        comm[v] = it->second;
        max_c = std::max(max_c, it->second);
    }
    std::vector<double> in_w(max_c + 1, 0.0), tot_w(max_c + 1, 0.0);
    double m2 = 0.0;  // sum of degrees = 2m
    for (int v = 0; v < n; ++v) {
        for (const auto& [u, w] : g.adj[v]) {
            m2 += w;
            tot_w[comm[v]] += w;
            if (comm[u] == comm[v]) in_w[comm[v]] += w;  // ordered pairs: both directions counted
        }
    }
    if (m2 == 0.0) return 0.0;
    double q = 0.0;
    for (int c = 0; c <= max_c; ++c) {
        const double t = tot_w[c] / m2;
        q += in_w[c] / m2 - t * t;
    }
    return q;
}

namespace {

// one Louvain pass on a weighted graph in index space; returns (assignment, improved)
struct LevelGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;  // may include self loop (v,v,w)
    double m2 = 0.0;                                       // total degree incl. self loops
};

bool louvain_level(const LevelGraph& lg, Rng& rng, std::vector<int>& node_comm) {
    const int n = static_cast<int>(lg.adj.size());
    node_comm.resize(n);
    std::iota(node_comm.begin(), node_comm.end(), 0);
    std::vector<double> k(n, 0.0);  // weighted degree; self loops count twice
    for (int v = 0; v < n; ++v) {
        for (const auto& [u, w] : lg.adj[v]) k[v] += (u == v) ? 2.0 * w : w;
    }
    std::vector<double> tot(n);
    for (int v = 0; v < n; ++v) tot[v] = k[v];
    const double m2 = lg.m2;
    if (m2 == 0.0) return false;

    std::vector<int> visit(n);
    std::iota(visit.begin(), visit.end(), 0);
    bool improved_any = false;
    bool improved = true;
    std::vector<double> w_to(n, 0.0);
    std::vector<int> touched;
    while (improved) {
        improved = false;
        rng.shuffle(visit);
        for (int v : visit) {
            const int old_c = node_comm[v];
            touched.clear();
            for (const auto& [u, w] : lg.adj[v]) {
                if (u == v) continue;
                const int c = node_comm[u];
                if (w_to[c] == 0.0) touched.push_back(c);
                w_to[c] += w;
            }
            // detach v, then compare candidate communities against staying put
            tot[old_c] -= k[v];
            std::sort(touched.begin(), touched.end());
            double best_gain = w_to[old_c] - tot[old_c] * k[v] / m2;
            int best_c = old_c;
            for (int c : touched) {
                if (c == old_c) continue;
                const double gain = w_to[c] - tot[c] * k[v] / m2;
                // strictly-better only; ascending scan keeps the smallest id on ties
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            tot[best_c] += k[v];
            node_comm[v] = best_c;
            if (best_c != old_c) {
                improved = true;
                improved_any = true;
            }
            for (int c : touched) w_to[c] = 0.0;
            w_to[old_c] = 0.0;
        }
    }
    return improved_any;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& node_comm, int n_comm) {
    LevelGraph out;
    out.adj.assign(n_comm, {});
    out.m2 = lg.m2;
    std::vector<std::map<int, double>> acc(n_comm);
    for (std::size_t v = 0; v < lg.adj.size(); ++v) {
        const int cv = node_comm[v];
        for (const auto& [u, w] : lg.adj[v]) {
            const int cu = node_comm[u];
            if (static_cast<int>(v) == u) {
                acc[cv][cv] += w;  // self loop carries over once
            } else if (cu == cv) {
                acc[cv][cv] += w / 2.0;  // each internal edge appears twice across the scan
            } else {
                acc[cv][cu] += w;
            }
        }
    }
    for (int c = 0; c < n_comm; ++c)
        for (const auto& [u, w] : acc[c]) out.adj[c].emplace_back(u, w);
    return out;
}

int renumber(std::vector<int>& node_comm) {
    std::map<int, int> remap;
    for (int& c : node_comm) {
        auto [it, inserted] = remap.try_emplace(c, static_cast<int>(remap.size()));
        c = it->second;
    }
    return static_cast<int>(remap.size());
}

std::map<std::string, int> run_louvain_once(const CoCommenterGraph& g, std::uint64_t seed) {
    const int n = static_cast<int>(g.nodes.size());
    LevelGraph lg;
    lg.adj.assign(n, {});
    for (int v = 0; v < n; ++v)
        for (const auto& [u, w] : g.adj[v]) {
            lg.adj[v].emplace_back(u, static_cast<double>(w));
            lg.m2 += w;
        }
    Rng rng(seed);
    std::vector<int> membership(n);
    std::iota(membership.begin(), membership.end(), 0);
    while (true) {
        std::vector<int> node_comm;
        const bool improved = louvain_level(lg, rng, node_comm);
        const int n_comm = renumber(node_comm);
        for (int& c : membership) c = node_comm[c];
        if (!improved || n_comm == static_cast<int>(lg.adj.size())) break;
        lg = aggregate(lg, node_comm, n_comm);
    }
    std::map<std::string, int> assignment;
    for (int v = 0; v < n; ++v) assignment[g.nodes[v]] = membership[v];
    return assignment;
}

// canonical ids: first appearance over nodes in sorted-id order
int canonicalize(std::map<std::string, int>& assignment) {
    std::map<int, int> remap;
    for (auto& [node, c] : assignment) {
        auto [it, inserted] = remap.try_emplace(c, static_cast<int>(remap.size()));
        c = it->second;
    }
    return static_cast<int>(remap.size());
}

}  // namespace

CommunityPartition detect_communities(const CoCommenterGraph& g, std::uint64_t seed) {
    CommunityPartition best;
    best.seed = seed;
    if (g.nodes.empty()) return best;
    constexpr int kRestarts = 4;
    bool have = false;
    for (int r = 0; r < kRestarts; ++r) {
        std::map<std::string, int> assignment =
            run_louvain_once(g, mix_seed(seed, 0x4c4f555641494eULL + static_cast<std::uint64_t>(r)));
        const double q = modularity(g, assignment);
        if (!have || q > best.modularity + 1e-12) {
            best.assignment = std::move(assignment);
            best.modularity = q;
            have = true;
        }
    }
    best.n_communities = canonicalize(best.assignment);
    return best;
}

}  // namespace mobscope
