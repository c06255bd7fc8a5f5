#include "linkpred/heuristics.hpp"

#include <algorithm>
#include <cmath>

#include "linkpred/errors.hpp"
#include "parallel.hpp"

namespace linkpred {

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

SetSimilarity set_similarity(std::span<const NodeId> a, std::span<const NodeId> b) {
    if (a.empty() || b.empty()) return {};
    const auto common = static_cast<double>(intersection_size(a, b));
    const auto size_a = static_cast<double>(a.size());
    const auto size_b = static_cast<double>(b.size());
    return {common / (size_a + size_b - common), common / std::sqrt(size_a * size_b)};
}

double adamic_adar(const DiGraph& g, NodeId u, NodeId v) {
    auto a = g.neighbors(u);
    auto b = g.neighbors(v);
    double score = 0.0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            const auto degree = g.neighbors(*i).size();
            if (degree > 1) score += 1.0 / std::log(static_cast<double>(degree));
            ++i;
            ++j;
        }
    }
    return score;
}

std::array<double, 6> weight_features(const DiGraph& g, NodeId u, NodeId v) {
    const double w_in = 1.0 / std::sqrt(1.0 + static_cast<double>(g.in_degree(v)));
    const double w_out = 1.0 / std::sqrt(1.0 + static_cast<double>(g.out_degree(u)));
    return {w_in, w_out, w_in + w_out, w_in * w_out, 2.0 * w_in + w_out, w_in + 2.0 * w_out};
}

HeuristicFeaturizer::HeuristicFeaturizer(const DiGraph& g, NodeScores scores, SvdFactors svd,
                                         ComponentLabels components, double missing_path_sentinel)
    : graph_(&g),
      scores_(std::move(scores)),
      svd_(std::move(svd)),
      components_(std::move(components)),
      sentinel_(missing_path_sentinel) {
    const std::size_t n = g.node_count();
    const bool sizes_match = scores_.pagerank.size() == n && scores_.katz.size() == n && scores_.hub.size() == n &&
                             scores_.authority.size() == n && components_.label.size() == n &&
                             static_cast<std::size_t>(svd_.u.rows()) == n &&
                             static_cast<std::size_t>(svd_.v.cols()) == n;
    if (!sizes_match) throw Error("featurizer artifacts were not computed on this graph");
    if (svd_.rank() != 6 || svd_.u.cols() != 6 || svd_.v.rows() != 6) {
        throw Error("the heuristic layout needs exactly 6 singular vectors");
    }
}

HeuristicFeaturizer HeuristicFeaturizer::fit(const DiGraph& g, const HeuristicConfig& cfg) {
    cfg.validate();
    std::vector<std::string> warnings;
    NodeScores scores;
    auto pagerank = compute_pagerank(g, cfg);
    if (!pagerank.converged) warnings.push_back("pagerank did not converge within max_iters");
    scores.pagerank = std::move(pagerank.values);
    auto katz = compute_katz(g, cfg);
    if (!katz.converged) warnings.push_back("katz did not converge within max_iters");
    scores.katz = std::move(katz.values);
    auto hits = compute_hits(g, cfg);
    if (!hits.converged) warnings.push_back("hits did not converge within max_iters");
    scores.hub = std::move(hits.hub);
    scores.authority = std::move(hits.authority);

    HeuristicFeaturizer f(g, std::move(scores), compute_svd(g, cfg.svd_rank, cfg.svd_seed),
                          weakly_connected_components(g), cfg.missing_path_sentinel);
    f.warnings_ = std::move(warnings);
    return f;
}

HeuristicVector HeuristicFeaturizer::featurize(NodeId u, NodeId v, BfsWorkspace& ws) const {
    const DiGraph& g = *graph_;
    if (!g.valid(u) || !g.valid(v)) throw Error("featurize: node id out of range");

    HeuristicVector h{};
    const auto followers_u = g.in_neighbors(u);
    const auto followers_v = g.in_neighbors(v);
    const auto followees_u = g.out_neighbors(u);
    const auto followees_v = g.out_neighbors(v);

    const auto followers = set_similarity(followers_u, followers_v);
    const auto followees = set_similarity(followees_u, followees_v);
    h[slot::jaccard_followers] = followers.jaccard;
    h[slot::jaccard_followees] = followees.jaccard;
    h[slot::cosine_followers] = followers.cosine;
    h[slot::cosine_followees] = followees.cosine;

    h[slot::pagerank_src] = scores_.pagerank[u];
    h[slot::pagerank_dst] = scores_.pagerank[v];

    auto path = bfs_distance(g, u, v, kUnboundedDepth, /*exclude_direct_edge=*/true, /*ignore_direction=*/false, ws);
    h[slot::shortest_path] = path ? static_cast<double>(*path) : sentinel_;
    h[slot::same_community] = components_.label[u] == components_.label[v] ? 1.0 : 0.0;
    h[slot::follows_back] = g.has_edge(v, u) ? 1.0 : 0.0;
    h[slot::adamic_adar] = adamic_adar(g, u, v);
    h[slot::katz_src] = scores_.katz[u];
    h[slot::katz_dst] = scores_.katz[v];
    h[slot::auth_src] = scores_.authority[u];
    h[slot::auth_dst] = scores_.authority[v];
    h[slot::hub_src] = scores_.hub[u];
    h[slot::hub_dst] = scores_.hub[v];

    h[slot::followers_src] = static_cast<double>(followers_u.size());
    h[slot::followees_src] = static_cast<double>(followees_u.size());
    h[slot::followers_dst] = static_cast<double>(followers_v.size());
    h[slot::followees_dst] = static_cast<double>(followees_v.size());
    h[slot::common_followers] = static_cast<double>(intersection_size(followers_u, followers_v));
    h[slot::common_followees] = static_cast<double>(intersection_size(followees_u, followees_v));

    const auto w = weight_features(g, u, v);
    std::copy(w.begin(), w.end(), h.begin() + slot::weights);

    const auto& U = svd_.u;
    const auto& V = svd_.v;
    for (Eigen::Index j = 0; j < 6; ++j) {
        h[slot::svd_u_src + j] = U(u, j);
        h[slot::svd_u_dst + j] = U(v, j);
        h[slot::svd_v_src + j] = V(j, u);
        h[slot::svd_v_dst + j] = V(j, v);
    }
    h[slot::svd_u_dot] = U.row(u).dot(U.row(v));
    h[slot::svd_v_dot] = V.col(u).dot(V.col(v));

    h[slot::in_degree_product] = h[slot::followers_src] * h[slot::followers_dst];
    h[slot::out_degree_product] = h[slot::followees_src] * h[slot::followees_dst];
    return h;
}

HeuristicVector HeuristicFeaturizer::featurize(NodeId u, NodeId v) const {
    BfsWorkspace ws(graph_->node_count());
    return featurize(u, v, ws);
}

FeatureMatrix featurize_edges(const HeuristicFeaturizer& featurizer, std::span<const LabeledEdge> edges,
                              unsigned threads) {
    FeatureMatrix out;
    out.rows = edges.size();
    out.cols = kHeuristicDim;
    out.values.resize(out.rows * out.cols);
    out.labels.resize(out.rows);

    auto work = [&](std::size_t begin, std::size_t end) {
        BfsWorkspace ws(featurizer.graph().node_count());
        for (std::size_t i = begin; i < end; ++i) {
            auto h = featurizer.featurize(edges[i].src, edges[i].dst, ws);
            std::copy(h.begin(), h.end(), out.row(i).begin());
            out.labels[i] = edges[i].label;
        }
    };

    detail::parallel_chunks(edges.size(), threads, work);
    return out;
}

FeatureMatrix featurize_dataset(const DiGraph& g, std::span<const LabeledEdge> edges, const HeuristicConfig& cfg,
                                unsigned threads) {
    auto featurizer = HeuristicFeaturizer::fit(g, cfg);
    return featurize_edges(featurizer, edges, threads);
}

}  // namespace linkpred
