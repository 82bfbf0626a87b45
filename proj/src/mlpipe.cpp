#include "mobscope/mlpipe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mobscope/errors.hpp"
#include "mobscope/rng.hpp"

namespace mobscope {

StandardizedMatrix standardize(const FeatureMatrix& m) {
    const int n = static_cast<int>(m.rows.size());
    if (n < 2) throw TooFewRowsError(n);
    const int d = 20;
    StandardizedMatrix sm;
    sm.data.resize(n, d);
    for (int i = 0; i < n; ++i) {
        sm.channel_ids.push_back(m.rows[i].channel_id);
        const auto vals = m.rows[i].features.as_array();
        for (int j = 0; j < d; ++j) sm.data(i, j) = vals[j];
    }
    sm.means = sm.data.colwise().mean();
    sm.data.rowwise() -= sm.means.transpose();
    sm.stds.resize(d);
    for (int j = 0; j < d; ++j) {
        const double var = sm.data.col(j).squaredNorm() / static_cast<double>(n);  // population
        const double sd = std::sqrt(var);
        if (sd == 0.0) {
            sm.stds(j) = 1.0;  // constant column: leave the zeros
        } else {
            sm.stds(j) = sd;
            sm.data.col(j) /= sd;
        }
    }
    return sm;
}

PCAProjection pca(const StandardizedMatrix& sm, int n_components) {
    const int n = static_cast<int>(sm.data.rows());
    const int d = static_cast<int>(sm.data.cols());
    if (n < 2) throw TooFewRowsError(n);
    if (n_components < 1 || n_components > std::min(n - 1, d))
        throw ConfigError("n_components", "must be in [1, min(rows-1, n_features)]");
    Eigen::MatrixXd cov = sm.data.transpose() * sm.data / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw InternalError("eigendecomposition failed");
    // ascending eigenvalues from Eigen; take the top ones, clamp round-off
    Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
    const double total = evals.sum();
    PCAProjection p;
    p.components.resize(d, n_components);
    p.explained_variance_ratio.resize(n_components);
    for (int c = 0; c < n_components; ++c) {
        const int src = d - 1 - c;
        Eigen::VectorXd v = es.eigenvectors().col(src);
        // canonical sign: largest-|loading| entry positive
        int arg = 0;
        for (int j = 1; j < d; ++j)
            if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
        if (v(arg) < 0) v = -v;
        p.components.col(c) = v;
        p.explained_variance_ratio(c) = total > 0.0 ? evals(src) / total : 0.0;
    }
    p.scores = sm.data * p.components;
    p.feature_means = sm.means;
    p.feature_stds = sm.stds;
    p.channel_ids = sm.channel_ids;
    return p;
}

double kmeans_objective(const Eigen::MatrixXd& pts, const std::vector<int>& labels,
                        const Eigen::MatrixXd& centroids) {
    double obj = 0.0;
    for (int i = 0; i < pts.rows(); ++i)
        obj += (pts.row(i) - centroids.row(labels[i])).squaredNorm();
    return obj;
}

double silhouette_score(const Eigen::MatrixXd& pts, const std::vector<int>& labels, int k) {
    const int n = static_cast<int>(pts.rows());
    std::vector<int> count(k, 0);
    for (int l : labels) ++count[l];
    double total = 0.0;
    std::vector<double> mean_dist(k);
    for (int i = 0; i < n; ++i) {
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[labels[j]] += (pts.row(i) - pts.row(j)).norm();
        }
        const int ci = labels[i];
        if (count[ci] <= 1) continue;  // singleton: s = 0
        const double a = mean_dist[ci] / static_cast<double>(count[ci] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == ci || count[c] == 0) continue;
            b = std::min(b, mean_dist[c] / static_cast<double>(count[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

namespace {

// canonical labels: cluster 0 is the one containing the first row, etc.
void relabel_by_first_appearance(std::vector<int>& labels, int k) {
    std::vector<int> remap(k, -1);
    int next = 0;
    for (int& l : labels) {
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
    }
}

struct KMeansRun {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double objective = std::numeric_limits<double>::infinity();
};

KMeansRun lloyd_once(const Eigen::MatrixXd& pts, int k, int max_iter, Rng& rng) {
    const int n = static_cast<int>(pts.rows());
    KMeansRun run;
    run.centroids.resize(k, pts.cols());
    // k-means++ seeding
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    run.centroids.row(0) = pts.row(first);
    for (int c = 1; c < k; ++c) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (pts.row(i) - run.centroids.row(c - 1)).squaredNorm());
            sum += d2[i];
        }
        int chosen;
        if (sum <= 0.0) {
            chosen = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            const double target = rng.next_double() * sum;
            double acc = 0.0;
            chosen = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        }
        run.centroids.row(c) = pts.row(chosen);
    }
    run.labels.assign(n, 0);
    std::vector<int> counts(k);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (pts.row(i) - run.centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double dist = (pts.row(i) - run.centroids.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (best != run.labels[i]) {
                run.labels[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::fill(counts.begin(), counts.end(), 0);
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, pts.cols());
        for (int i = 0; i < n; ++i) {
            sums.row(run.labels[i]) += pts.row(i);
            ++counts[run.labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                run.centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
            } else {
                // empty cluster: seize the point farthest from its centroid
                int far = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double dist = (pts.row(i) - run.centroids.row(run.labels[i])).squaredNorm();
                    if (dist > far_d && counts[run.labels[i]] > 1) {
                        far_d = dist;
                        far = i;
                    }
                }
                --counts[run.labels[far]];
                run.labels[far] = c;
                counts[c] = 1;
                run.centroids.row(c) = pts.row(far);
            }
        }
    }
    run.objective = kmeans_objective(pts, run.labels, run.centroids);
    return run;
}

KMeansRun best_kmeans(const Eigen::MatrixXd& pts, int k, const KMeansOptions& opts,
                      std::uint64_t seed) {
    KMeansRun best;
    for (int r = 0; r < opts.restarts; ++r) {
        Rng rng(mix_seed(seed, (static_cast<std::uint64_t>(k) << 32) |
                                   static_cast<std::uint64_t>(r)));
        KMeansRun run = lloyd_once(pts, k, opts.max_iter, rng);
        if (run.objective < best.objective) best = std::move(run);
    }
    return best;
}

}  // namespace

ClusterAssignment kmeans_cluster(const EmbeddedPoints& pts, const KMeansOptions& opts,
                                 std::uint64_t seed) {
    const int n = static_cast<int>(pts.coords.rows());
    if (n < 3) throw TooFewPointsError(n);
    int k_lo = opts.k_min, k_hi = std::min(opts.k_max, n - 1);
    if (opts.fixed_k) {
        if (*opts.fixed_k < 2 || *opts.fixed_k > n) throw InvalidKError(*opts.fixed_k, n);
        k_lo = k_hi = *opts.fixed_k;
    }
    if (k_lo > k_hi) throw ConfigError("k_range", "empty after capping at n-1");
    int best_k = -1;
    double best_sil = -2.0;
    std::vector<int> best_labels;
    for (int k = k_lo; k <= k_hi; ++k) {
        KMeansRun run = best_kmeans(pts.coords, k, opts, seed);
        const double sil = silhouette_score(pts.coords, run.labels, k);
        if (sil > best_sil + 1e-12) {  // ties keep the smaller k
            best_sil = sil;
            best_k = k;
            best_labels = run.labels;
        }
    }
    relabel_by_first_appearance(best_labels, best_k);
    ClusterAssignment a;
    a.method = ClusterMethod::kmeans;
    a.k = best_k;
    a.silhouette = best_sil;
    a.seed = seed;
    for (int i = 0; i < n; ++i) a.labels[pts.ids[i]] = best_labels[i];
    return a;
}

HierarchicalResult hierarchical_cluster(const EmbeddedPoints& pts, int k) {
    const int n = static_cast<int>(pts.coords.rows());
    if (n < 2) throw TooFewPointsError(n);
    if (k < 2 || k > n) throw InvalidKError(k, n);
    // active clusters keyed by scipy-style id; dist matrix indexed by slot
    std::vector<int> slot_id(n);       // slot -> cluster id
    std::vector<bool> alive(n, true);  // slot alive?
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        slot_id[i] = i;
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j)
            dist(i, j) = dist(j, i) = (pts.coords.row(i) - pts.coords.row(j)).norm();
    }
    std::vector<int> member_slot(n);  // point -> slot
    for (int i = 0; i < n; ++i) member_slot[i] = i;

    HierarchicalResult res;
    // cut state: the slot each point belongs to after n-k merges
    std::vector<int> cut_slot = member_slot;
    for (int step = 0; step < n - 1; ++step) {
        // closest pair of alive slots; ties by smaller cluster-id pair
        int si = -1, sj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!alive[j]) continue;
                const double dij = dist(i, j);
                int a = std::min(slot_id[i], slot_id[j]);
                int b = std::max(slot_id[i], slot_id[j]);
                if (si < 0 || dij < best) {
                    best = dij;
                    si = i;
                    sj = j;
                } else if (dij == best) {
                    int ca = std::min(slot_id[si], slot_id[sj]);
                    int cb = std::max(slot_id[si], slot_id[sj]);
                    if (a < ca || (a == ca && b < cb)) {
                        si = i;
                        sj = j;
                    }
                }
            }
        }
        DendrogramMerge m;
        m.step = step;
        m.cluster_a = std::min(slot_id[si], slot_id[sj]);
        m.cluster_b = std::max(slot_id[si], slot_id[sj]);
        m.distance = best;
        res.merges.push_back(m);
        // single linkage update into slot si; kill sj
        for (int t = 0; t < n; ++t) {
            if (!alive[t] || t == si || t == sj) continue;
            dist(si, t) = dist(t, si) = std::min(dist(si, t), dist(sj, t));
        }
        alive[sj] = false;
        slot_id[si] = n + step;
        for (int p = 0; p < n; ++p)
            if (member_slot[p] == sj) member_slot[p] = si;
        if (step + 1 == n - k) cut_slot = member_slot;  // labels come from here
    }
    // labels by first appearance over rows (ids are sorted upstream)
    std::vector<int> labels(n);
    std::map<int, int> slot_to_label;
    for (int i = 0; i < n; ++i) {
        auto [it, fresh] = slot_to_label.try_emplace(cut_slot[i],
                                                     static_cast<int>(slot_to_label.size()));
        labels[i] = it->second;
    }
    ClusterAssignment a;
    a.method = ClusterMethod::hierarchical;
    a.k = k;
    a.silhouette = k >= 2 && n >= 2 ? silhouette_score(pts.coords, labels, k) : 0.0;
    for (int i = 0; i < n; ++i) a.labels[pts.ids[i]] = labels[i];
    res.assignment = std::move(a);
    return res;
}

std::vector<ClusterSummaryRow> cluster_summary(const ClusterAssignment& assignment,
                                               const FeatureMatrix& m) {
    int k = 0;
    for (const auto& [id, c] : assignment.labels) k = std::max(k, c + 1);
    std::vector<ClusterSummaryRow> rows(k);
    for (int c = 0; c < k; ++c) rows[c].cluster = c;
    for (const auto& fr : m.rows) {
        auto it = assignment.labels.find(fr.channel_id);
        if (it == assignment.labels.end()) continue;  // channel excluded from clustering
        ClusterSummaryRow& r = rows[it->second];
        r.mean_acc += fr.features.acc;
        r.mean_density += fr.features.density;
        r.mean_modularity += fr.features.modularity_q;
        r.channels.push_back(fr.channel_id);
    }
    for (auto& r : rows) {
        const double sz = static_cast<double>(r.channels.size());
        if (sz > 0) {
            r.mean_acc /= sz;
            r.mean_density /= sz;
            r.mean_modularity /= sz;
        }
    }
    // comparative description: rank each metric across clusters
    auto qualify = [&](auto metric) {
        std::vector<std::pair<double, int>> vals;
        for (const auto& r : rows) vals.emplace_back(metric(r), r.cluster);
        std::sort(vals.begin(), vals.end());
        std::vector<std::string> word(rows.size(), "mid");
        if (!vals.empty()) {
            word[vals.front().second] = "low";
            word[vals.back().second] = "high";
        }
        return word;
    };
    const auto acc_w = qualify([](const ClusterSummaryRow& r) { return r.mean_acc; });
    const auto den_w = qualify([](const ClusterSummaryRow& r) { return r.mean_density; });
    const auto mod_w = qualify([](const ClusterSummaryRow& r) { return r.mean_modularity; });
    for (auto& r : rows) {
        r.description = acc_w[r.cluster] + " clustering, " + den_w[r.cluster] + " density, " +
                        mod_w[r.cluster] + " modularity";
    }
    return rows;
}

double clustering_agreement(const ClusterAssignment& a, const ClusterAssignment& b) {
    if (a.labels.size() != b.labels.size()) throw MismatchedChannelsError();
    std::map<std::pair<int, int>, std::int64_t> contingency;
    std::map<int, std::int64_t> row_sum, col_sum;
    std::int64_t n = 0;
    auto ita = a.labels.begin();
    auto itb = b.labels.begin();
    for (; ita != a.labels.end(); ++ita, ++itb) {
        if (ita->first != itb->first) throw MismatchedChannelsError();
        ++contingency[{ita->second, itb->second}];
        ++row_sum[ita->second];
        ++col_sum[itb->second];
        ++n;
    }
    auto choose2 = [](std::int64_t x) { return static_cast<double>(x) * (x - 1) / 2.0; };
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [rc, cnt] : contingency) index += choose2(cnt);
    for (const auto& [r, cnt] : row_sum) sum_a += choose2(cnt);
    for (const auto& [c, cnt] : col_sum) sum_b += choose2(cnt);
    const double total_pairs = choose2(n);
    if (total_pairs == 0.0) return 1.0;
    const double expected = sum_a * sum_b / total_pairs;
    const double max_index = (sum_a + sum_b) / 2.0;
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both partitions degenerate in the same way
    return (index - expected) / denom;
}

}  // namespace mobscope
