#include "linkpred/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "linkpred/errors.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

namespace {

enum Stream : std::uint64_t { kSplitStream = 1, kNegativeStream = 2, kNegativeSplitStream = 3, kOrderStream = 4 };

std::uint64_t pair_key(NodeId a, NodeId b) { return (std::uint64_t{a} << 32) | b; }

bool sorted_intersects(std::span<const NodeId> a, std::span<const NodeId> b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

PositiveSplit split_positive_edges(const DiGraph& g, double test_fraction, std::uint64_t seed) {
    if (g.node_count() == 0 || g.edge_count() == 0) throw Error("split_positive_edges: graph is empty");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("test fraction must lie in (0, 1)");

    std::vector<Edge> edges = g.edges();
    std::vector<std::size_t> residual(g.node_count(), 0);
    for (const Edge& e : edges) {
        ++residual[e.src];
        ++residual[e.dst];
    }
    const auto target = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(edges.size()) - 1e-9));

    Rng rng = make_rng(seed, kSplitStream);
    std::shuffle(edges.begin(), edges.end(), rng);

    PositiveSplit out;
    out.train.reserve(edges.size());
    out.test.reserve(target);
    for (const Edge& e : edges) {
        if (out.test.size() < target && residual[e.src] >= 2 && residual[e.dst] >= 2) {
            --residual[e.src];
            --residual[e.dst];
            out.test.push_back(e);
        } else {
            out.train.push_back(e);
        }
    }
    out.shortfall = target - out.test.size();
    return out;
}

bool is_distant_pair(const DiGraph& g, NodeId u, NodeId v) {
    if (u == v) return false;
    auto nu = g.neighbors(u);
    if (std::binary_search(nu.begin(), nu.end(), v)) return false;
    return !sorted_intersects(nu, g.neighbors(v));
}

NegativeSample sample_negative_edges(const DiGraph& g, std::size_t count, std::uint64_t seed) {
    if (g.node_count() == 0) throw Error("sample_negative_edges: graph is empty");
    NegativeSample out;
    if (count == 0) return out;

    Rng rng = make_rng(seed, kNegativeStream);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count() - 1));
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * count);
    out.pairs.reserve(count);
    const std::size_t budget = 100 * count;
    while (out.pairs.size() < count && out.attempts < budget) {
        ++out.attempts;
        NodeId u = pick(rng);
        NodeId v = pick(rng);
        if (!g.directed() && v < u) std::swap(u, v);
        if (!is_distant_pair(g, u, v)) continue;
        if (!seen.insert(pair_key(u, v)).second) continue;
        out.pairs.push_back({u, v});
    }
    out.shortfall = count - out.pairs.size();
    return out;
}

SplitDataset assemble_dataset(const DiGraph& g, double test_fraction, std::uint64_t seed) {
    PositiveSplit positives = split_positive_edges(g, test_fraction, seed);
    const std::size_t positive_total = positives.train.size() + positives.test.size();
    NegativeSample negatives = sample_negative_edges(g, positive_total, seed);

    Rng split_rng = make_rng(seed, kNegativeSplitStream);
    std::shuffle(negatives.pairs.begin(), negatives.pairs.end(), split_rng);
    const auto test_negatives = static_cast<std::size_t>(
        std::llround(static_cast<double>(negatives.pairs.size()) * static_cast<double>(positives.test.size()) /
                     static_cast<double>(positive_total)));

    SplitDataset ds;
    ds.seed = seed;
    ds.test_fraction = test_fraction;
    ds.positive_shortfall = positives.shortfall;
    ds.negative_shortfall = negatives.shortfall;

    auto labels = weakly_connected_components(g).label;
    for (const Edge& e : negatives.pairs) {
        if (labels[e.src] != labels[e.dst]) ++ds.cross_component_negatives;
    }

    for (const Edge& e : positives.train) ds.train.push_back({e.src, e.dst, 1});
    for (const Edge& e : positives.test) ds.test.push_back({e.src, e.dst, 1});
    for (std::size_t i = 0; i < negatives.pairs.size(); ++i) {
        const Edge& e = negatives.pairs[i];
        (i < test_negatives ? ds.test : ds.train).push_back({e.src, e.dst, 0});
    }
    Rng order_rng = make_rng(seed, kOrderStream);
    std::shuffle(ds.train.begin(), ds.train.end(), order_rng);
    std::shuffle(ds.test.begin(), ds.test.end(), order_rng);

    std::vector<RawId> raw(g.raw_ids().begin(), g.raw_ids().end());
    ds.train_graph = DiGraph::from_edges(g.node_count(), positives.train, g.directed(), std::move(raw));
    return ds;
}

}  // namespace linkpred
