#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "linkpred/errors.hpp"
#include "linkpred/graph.hpp"
#include "synthetic.hpp"

using namespace linkpred;
using testkit::from_pairs;

namespace {

std::vector<NodeId> to_vec(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

RawEdgeList parse(const std::string& text, ParseOptions opts = {}) {
    std::istringstream in(text);
    return parse_edge_list(in, opts);
}

}  // namespace

TEST(ParseEdgeList, SkipsCommentsAndKeepsOrder) {
    auto raw = parse("# c\n0\t1\n1\t2");
    std::vector<std::pair<RawId, RawId>> expected{{0, 1}, {1, 2}};
    EXPECT_EQ(raw.edges, expected);
}

TEST(ParseEdgeList, KeepsSelfLoops) {
    auto raw = parse("3 3\n3 4");
    std::vector<std::pair<RawId, RawId>> expected{{3, 3}, {3, 4}};
    EXPECT_EQ(raw.edges, expected);
}

TEST(ParseEdgeList, BlankLinesAndCommas) {
    auto raw = parse("\n1,2\n\n  5   6  \r\n");
    ASSERT_EQ(raw.edges.size(), 2u);
    EXPECT_EQ(raw.edges[1], (std::pair<RawId, RawId>{5, 6}));
}

TEST(ParseEdgeList, ReportsLineNumber) {
    try {
        parse("# header\n1 2\n1 x\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse("1 2 3\n"), ParseError);
    EXPECT_THROW(parse("7\n"), ParseError);
}

TEST(ParseEdgeList, HeaderOnlyWhenAllowed) {
    EXPECT_THROW(parse("from,to\n1,2\n"), ParseError);
    ParseOptions opts;
    opts.allow_header = true;
    EXPECT_EQ(parse("from,to\n1,2\n", opts).edges.size(), 1u);
}

TEST(BuildGraph, RelabelsInFirstAppearanceOrder) {
    auto g = from_pairs({{5, 9}, {9, 5}});
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(to_vec(g.out_neighbors(0)), std::vector<NodeId>{1});
    EXPECT_EQ(to_vec(g.out_neighbors(1)), std::vector<NodeId>{0});
    EXPECT_EQ(g.raw_id(0), 5);
    EXPECT_EQ(g.dense_id(9), std::optional<NodeId>(1));
    EXPECT_FALSE(g.dense_id(7).has_value());
}

TEST(BuildGraph, DropsSelfLoopsAndDuplicates) {
    auto g = from_pairs({{0, 1}, {0, 1}, {2, 2}});
    EXPECT_EQ(g.node_count(), 3u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_TRUE(g.has_edge(0, 1));
    EXPECT_FALSE(g.has_edge(2, 2));
}

TEST(BuildGraph, EmptyEdgeListThrows) {
    RawEdgeList raw;
    EXPECT_THROW(DiGraph::build(raw), Error);
}

TEST(BuildGraph, UndirectedIsSymmetric) {
    auto g = testkit::random_graph(40, 0.1, 3, false);
    for (const auto& e : g.arcs()) EXPECT_TRUE(g.has_edge(e.dst, e.src));
    EXPECT_EQ(g.arc_count(), 2 * g.edge_count());
}

TEST(BuildGraph, AdjacencyInvariants) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = testkit::random_graph(30, 0.15, seed);
        std::size_t out_total = 0;
        std::size_t in_total = 0;
        for (NodeId u = 0; u < g.node_count(); ++u) {
            auto out = g.out_neighbors(u);
            EXPECT_TRUE(std::is_sorted(out.begin(), out.end()));
            EXPECT_EQ(std::adjacent_find(out.begin(), out.end()), out.end());
            for (NodeId v : out) {
                auto in = g.in_neighbors(v);
                EXPECT_TRUE(std::binary_search(in.begin(), in.end(), u));
                EXPECT_NE(u, v);
            }
            out_total += out.size();
            in_total += g.in_neighbors(u).size();
        }
        EXPECT_EQ(out_total, g.edge_count());
        EXPECT_EQ(in_total, g.edge_count());
    }
}

TEST(Bfs, TwoHopChain) {
    auto g = testkit::path_graph(3, true);
    EXPECT_EQ(bfs_distance(g, 0, 2, kUnboundedDepth, false, false), std::optional<std::uint32_t>(2));
    EXPECT_FALSE(bfs_distance(g, 2, 0, kUnboundedDepth, false, false).has_value());
    EXPECT_EQ(bfs_distance(g, 2, 0, kUnboundedDepth, false, true), std::optional<std::uint32_t>(2));
}

TEST(Bfs, ExcludingDirectEdgeOnTriangle) {
    auto g = from_pairs({{0, 1}, {0, 2}, {2, 1}});
    EXPECT_EQ(bfs_distance(g, 0, 1, kUnboundedDepth, false, false), std::optional<std::uint32_t>(1));
    EXPECT_EQ(bfs_distance(g, 0, 1, kUnboundedDepth, true, false), std::optional<std::uint32_t>(2));
}

TEST(Bfs, DisconnectedIsAbsent) {
    auto g = from_pairs({{0, 1}, {2, 3}});
    EXPECT_FALSE(bfs_distance(g, 0, 3, kUnboundedDepth, false, true).has_value());
}

TEST(Bfs, RespectsMaxDepth) {
    auto g = testkit::path_graph(6, true);
    EXPECT_FALSE(bfs_distance(g, 0, 5, 4, false, false).has_value());
    EXPECT_EQ(bfs_distance(g, 0, 5, 5, false, false), std::optional<std::uint32_t>(5));
}

TEST(Bfs, DistanceOneIffArc) {
    auto g = testkit::random_graph(25, 0.12, 11);
    BfsWorkspace ws(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v = 0; v < g.node_count(); ++v) {
            if (u == v) continue;
            auto d = bfs_distance(g, u, v, kUnboundedDepth, false, false, ws);
            EXPECT_EQ(d == std::optional<std::uint32_t>(1), g.has_edge(u, v)) << u << "->" << v;
        }
    }
}

TEST(Bfs, MatchesOracleAndIsSymmetricWhenUndirected) {
    auto g = testkit::random_graph(30, 0.07, 5, false);
    BfsWorkspace ws(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v = u + 1; v < g.node_count(); ++v) {
            auto a = bfs_distance(g, u, v, kUnboundedDepth, false, false, ws);
            auto b = bfs_distance(g, v, u, kUnboundedDepth, false, false, ws);
            EXPECT_EQ(a, b);
            const int oracle = testkit::undirected_distance(g, u, v);
            EXPECT_EQ(a.has_value(), oracle >= 0);
            if (a) EXPECT_EQ(static_cast<int>(*a), oracle);
        }
    }
}

TEST(Components, SmallCases) {
    EXPECT_EQ(weakly_connected_components(from_pairs({{0, 1}, {2, 3}})).component_count, 2u);
    EXPECT_EQ(weakly_connected_components(testkit::directed_cycle(3)).component_count, 1u);
}

TEST(Components, MatchUnionFindAndArePermutationInvariant) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = testkit::random_graph(60, 0.02, seed);
        auto labels = weakly_connected_components(g);
        auto oracle = testkit::union_find_labels(g);
        std::map<std::size_t, std::size_t> forward;
        std::map<std::size_t, std::size_t> backward;
        for (NodeId u = 0; u < g.node_count(); ++u) {
            EXPECT_LT(labels.label[u], labels.component_count);
            auto [it, fresh] = forward.emplace(labels.label[u], oracle[u]);
            EXPECT_EQ(it->second, oracle[u]);
            auto [jt, fresh2] = backward.emplace(oracle[u], labels.label[u]);
            EXPECT_EQ(jt->second, labels.label[u]);
        }
        EXPECT_EQ(forward.size(), labels.component_count);

        // Same graph from a shuffled edge list: same partition by raw id.
        RawEdgeList raw;
        for (const auto& e : g.arcs()) raw.edges.emplace_back(e.src, e.dst);
        std::shuffle(raw.edges.begin(), raw.edges.end(), std::mt19937_64(seed));
        auto h = DiGraph::build(raw);
        auto relabeled = weakly_connected_components(h);
        for (const auto& e : g.arcs()) {
            for (const auto& f : g.arcs()) {
                const bool same = labels.label[e.src] == labels.label[f.src];
                const bool same_h = relabeled.label[*h.dense_id(e.src)] == relabeled.label[*h.dense_id(f.src)];
                EXPECT_EQ(same, same_h);
            }
        }
    }
}
