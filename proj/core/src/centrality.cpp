#include <cmath>
#include <numeric>

#include "linkpred/errors.hpp"
#include "linkpred/heuristics.hpp"

namespace linkpred {

namespace {

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

void scale_to_unit_sum(std::vector<double>& x) {
    double s = std::accumulate(x.begin(), x.end(), 0.0);
    if (!(s > 0.0)) throw Error("cannot normalize a zero score vector");
    for (double& v : x) v /= s;
}

}  // namespace

void HeuristicConfig::validate() const {
    if (!(pagerank_damping > 0.0 && pagerank_damping < 1.0)) throw Error("pagerank damping must lie in (0, 1)");
    if (!(pagerank_tol > 0.0 && katz_tol > 0.0 && hits_tol > 0.0)) throw Error("tolerances must be positive");
    if (svd_rank < 1) throw Error("svd rank must be at least 1");
    if (max_iters < 1) throw Error("max_iters must be at least 1");
    if (!std::isfinite(missing_path_sentinel)) throw Error("missing-path sentinel must be finite");
}

IterativeResult compute_pagerank(const DiGraph& g, const HeuristicConfig& cfg) {
    const std::size_t n = g.node_count();
    if (n == 0) throw Error("pagerank: graph has no nodes");
    const double d = cfg.pagerank_damping;
    const double inv_n = 1.0 / static_cast<double>(n);

    IterativeResult out;
    std::vector<double> x(n, inv_n);
    std::vector<double> next(n);
    std::vector<double> share(n);
    for (out.iterations = 1; out.iterations <= cfg.max_iters; ++out.iterations) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            const auto deg = g.out_degree(u);
            if (deg == 0) {
                dangling += x[u];
                share[u] = 0.0;
            } else {
                share[u] = x[u] / static_cast<double>(deg);
            }
        }
        const double base = (1.0 - d) * inv_n + d * dangling * inv_n;
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.in_neighbors(v)) acc += share[u];
            next[v] = base + d * acc;
        }
        const double change = l1_distance(next, x);
        x.swap(next);
        if (change < cfg.pagerank_tol) {
            out.converged = true;
            break;
        }
    }
    out.iterations = std::min(out.iterations, cfg.max_iters);
    scale_to_unit_sum(x);
    out.values = std::move(x);
    return out;
}

IterativeResult compute_katz(const DiGraph& g, const HeuristicConfig& cfg) {
    const std::size_t n = g.node_count();
    if (n == 0) throw Error("katz: graph has no nodes");

    IterativeResult out;
    std::vector<double> x(n, 0.0);
    std::vector<double> next(n);
    for (out.iterations = 1; out.iterations <= cfg.max_iters; ++out.iterations) {
        double norm_sq = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.in_neighbors(v)) acc += x[u];
            next[v] = cfg.katz_alpha * acc + cfg.katz_beta;
            norm_sq += next[v] * next[v];
        }
        if (!(std::sqrt(norm_sq) <= 1e12)) {
            throw DivergenceError("katz iteration diverged after " + std::to_string(out.iterations) +
                                  " steps; alpha=" + std::to_string(cfg.katz_alpha) +
                                  " exceeds 1/spectral radius, choose a smaller alpha");
        }
        const double change = l1_distance(next, x);
        x.swap(next);
        if (change < cfg.katz_tol * static_cast<double>(n)) {
            out.converged = true;
            break;
        }
    }
    out.iterations = std::min(out.iterations, cfg.max_iters);
    double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (!(norm > 0.0)) throw Error("katz: zero score vector (beta = 0?)");
    for (double& v : x) v /= norm;
    out.values = std::move(x);
    return out;
}

HitsResult compute_hits(const DiGraph& g, const HeuristicConfig& cfg) {
    const std::size_t n = g.node_count();
    if (g.arc_count() == 0) throw Error("hits: graph has no edges");

    HitsResult out;
    std::vector<double> hub(n, 1.0 / static_cast<double>(n));
    std::vector<double> auth(n, 0.0);
    std::vector<double> next_auth(n);
    std::vector<double> next_hub(n);
    for (out.iterations = 1; out.iterations <= cfg.max_iters; ++out.iterations) {
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.in_neighbors(v)) acc += hub[u];
            next_auth[v] = acc;
        }
        scale_to_unit_sum(next_auth);
        for (NodeId u = 0; u < n; ++u) {
            double acc = 0.0;
            for (NodeId v : g.out_neighbors(u)) acc += next_auth[v];
            next_hub[u] = acc;
        }
        scale_to_unit_sum(next_hub);
        const double auth_change = l1_distance(next_auth, auth);
        const double hub_change = l1_distance(next_hub, hub);
        auth.swap(next_auth);
        hub.swap(next_hub);
        if (auth_change < cfg.hits_tol && hub_change < cfg.hits_tol) {
            out.converged = true;
            break;
        }
    }
    out.iterations = std::min(out.iterations, cfg.max_iters);
    out.hub = std::move(hub);
    out.authority = std::move(auth);
    return out;
}

}  // namespace linkpred
