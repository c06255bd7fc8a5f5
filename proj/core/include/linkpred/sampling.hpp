#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "linkpred/graph.hpp"

namespace linkpred {

struct LabeledEdge {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint8_t label = 0;  // 1 = existing edge, 0 = sampled non-edge

    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

struct PositiveSplit {
    std::vector<Edge> train;
    std::vector<Edge> test;
    /// Requested test edges that could not be removed without isolating a node.
    std::size_t shortfall = 0;
};

/// Moves up to ⌈fraction·E⌉ edges to the test side, visiting edges in a
/// seeded shuffle and taking an edge only if both endpoints keep at least one
/// other incident edge. Undirected graphs are split over unordered pairs.
PositiveSplit split_positive_edges(const DiGraph& g, double test_fraction, std::uint64_t seed);

struct NegativeSample {
    std::vector<Edge> pairs;
    std::size_t shortfall = 0;
    std::size_t attempts = 0;
};

/// True iff u != v and v lies outside u's undirected 2-hop ball.
bool is_distant_pair(const DiGraph& g, NodeId u, NodeId v);

/// Rejection-samples `count` distinct pairs at undirected distance >= 3.
/// Gives up after 100·count draws and reports the shortfall.
NegativeSample sample_negative_edges(const DiGraph& g, std::size_t count, std::uint64_t seed);

struct SplitDataset {
    DiGraph train_graph;
    std::vector<LabeledEdge> train;
    std::vector<LabeledEdge> test;
    std::uint64_t seed = 0;
    double test_fraction = 0.1;
    std::size_t positive_shortfall = 0;
    std::size_t negative_shortfall = 0;
    /// Negatives whose endpoints lie in different weak components (distance ∞).
    std::size_t cross_component_negatives = 0;
};

SplitDataset assemble_dataset(const DiGraph& g, double test_fraction, std::uint64_t seed);

}  // namespace linkpred
