#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "linkpred/sampling.hpp"
#include "synthetic.hpp"

using namespace linkpred;

namespace {

std::size_t positives(const std::vector<LabeledEdge>& edges) {
    std::size_t n = 0;
    for (const auto& e : edges) n += e.label;
    return n;
}

}  // namespace

TEST(SplitPositive, CycleGivesOneTestEdge) {
    auto g = testkit::directed_cycle(10);
    auto split = split_positive_edges(g, 0.1, 1);
    EXPECT_EQ(split.test.size(), 1u);
    EXPECT_EQ(split.train.size(), 9u);
    EXPECT_EQ(split.shortfall, 0u);
    std::vector<int> incident(10, 0);
    for (const auto& e : split.train) {
        ++incident[e.src];
        ++incident[e.dst];
    }
    for (int c : incident) EXPECT_GE(c, 1);
}

TEST(SplitPositive, StarCannotLoseAnyEdge) {
    // Every leaf hangs on a single edge, so no removal is allowed.
    auto g = testkit::out_star(5);
    auto split = split_positive_edges(g, 0.4, 3);
    EXPECT_TRUE(split.test.empty());
    EXPECT_EQ(split.shortfall, 2u);
    EXPECT_EQ(split.train.size(), 5u);
}

TEST(SplitPositive, UndirectedSplitsUnorderedPairs) {
    auto g = testkit::clique(6);
    auto split = split_positive_edges(g, 0.2, 9);
    EXPECT_EQ(split.test.size() + split.train.size(), 15u);
    EXPECT_EQ(split.test.size(), 3u);
    for (const auto& e : split.test) EXPECT_LT(e.src, e.dst);
}

TEST(SplitPositive, Deterministic) {
    auto g = testkit::random_graph(50, 0.1, 2);
    auto a = split_positive_edges(g, 0.1, 77);
    auto b = split_positive_edges(g, 0.1, 77);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.train, b.train);
}

TEST(NegativeSampling, ZeroCountOnTriangle) {
    auto g = testkit::from_pairs({{0, 1}, {1, 2}, {2, 0}});
    auto neg = sample_negative_edges(g, 0, 1);
    EXPECT_TRUE(neg.pairs.empty());
    EXPECT_EQ(neg.shortfall, 0u);
}

TEST(NegativeSampling, PathDistanceFilter) {
    auto g = testkit::path_graph(5, false);
    EXPECT_TRUE(is_distant_pair(g, 0, 4));
    EXPECT_TRUE(is_distant_pair(g, 0, 3));
    EXPECT_FALSE(is_distant_pair(g, 0, 2));
    EXPECT_FALSE(is_distant_pair(g, 0, 1));
    EXPECT_FALSE(is_distant_pair(g, 2, 2));
}

TEST(NegativeSampling, ShortfallWhenImpossible) {
    auto g = testkit::clique(5);
    auto neg = sample_negative_edges(g, 3, 4);
    EXPECT_TRUE(neg.pairs.empty());
    EXPECT_EQ(neg.shortfall, 3u);
    EXPECT_EQ(neg.attempts, 300u);
}

TEST(NegativeSampling, EveryPairPassesOracle) {
    auto g = testkit::random_graph(120, 0.02, 8);
    auto neg = sample_negative_edges(g, g.edge_count(), 21);
    EXPECT_EQ(neg.pairs.size(), g.edge_count());
    std::set<Edge> seen;
    for (const auto& p : neg.pairs) {
        EXPECT_NE(p.src, p.dst);
        EXPECT_FALSE(g.has_edge(p.src, p.dst));
        const int d = testkit::undirected_distance(g, p.src, p.dst);
        EXPECT_TRUE(d < 0 || d >= 3) << p.src << "," << p.dst << " at distance " << d;
        EXPECT_TRUE(seen.insert(p).second);
    }
}

TEST(Assemble, CycleArithmetic) {
    auto g = testkit::directed_cycle(10);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto ds = assemble_dataset(g, 0.1, seed);
        EXPECT_EQ(positives(ds.train), 9u);
        EXPECT_EQ(positives(ds.test), 1u);
        EXPECT_EQ(ds.train.size() - positives(ds.train), 9u);
        EXPECT_EQ(ds.test.size() - positives(ds.test), 1u);
        EXPECT_EQ(ds.train_graph.node_count(), 10u);
    }
}

TEST(Assemble, DeterministicAndDisjoint) {
    auto g = testkit::random_graph(80, 0.05, 4);
    auto a = assemble_dataset(g, 0.1, 5);
    auto b = assemble_dataset(g, 0.1, 5);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::pair<NodeId, NodeId>> train;
    for (const auto& e : a.train) train.emplace(e.src, e.dst);
    for (const auto& e : a.test) {
        EXPECT_FALSE(train.count({e.src, e.dst}));
        if (e.label) EXPECT_FALSE(a.train_graph.has_edge(e.src, e.dst));
    }
    for (const auto& e : a.train) {
        if (e.label) EXPECT_TRUE(a.train_graph.has_edge(e.src, e.dst));
    }
}

TEST(Assemble, RecordsCrossComponentNegatives) {
    auto g = testkit::from_pairs({{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    auto ds = assemble_dataset(g, 0.2, 1);
    std::size_t cross = 0;
    auto labels = testkit::union_find_labels(g);
    for (const auto* set : {&ds.train, &ds.test}) {
        for (const auto& e : *set) cross += !e.label && labels[e.src] != labels[e.dst];
    }
    EXPECT_EQ(cross, ds.cross_component_negatives);
    EXPECT_GT(cross, 0u);
}
