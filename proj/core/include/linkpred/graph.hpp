#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace linkpred {

using NodeId = std::uint32_t;
using RawId = std::int64_t;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Edge pairs exactly as read from a file. Duplicates and self-loops are kept;
/// cleaning happens in DiGraph::build.
struct RawEdgeList {
    std::vector<std::pair<RawId, RawId>> edges;
    bool directed = true;
};

struct ParseOptions {
    bool directed = true;
    /// Accept one leading non-numeric line (e.g. the `from,to` line of the
    /// MUSAE csv exports).
    bool allow_header = false;
};

/// Reads the SNAP edge-list format: '#' comments, blank lines, and lines of
/// two integers separated by whitespace (commas are accepted as separators).
/// Throws ParseError carrying the 1-based line number.
RawEdgeList parse_edge_list(std::istream& in, const ParseOptions& options = {});
RawEdgeList read_edge_list_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Immutable directed graph over dense ids 0..N-1 in CSR form.
///
/// Undirected graphs store both arcs of every edge, so out/in adjacency are
/// identical. A third CSR holds the undirected neighbourhood (in ∪ out) which
/// several features and the negative sampler work on.
class DiGraph {
public:
    DiGraph() = default;

    /// Maps raw ids to dense ids in first-appearance order, drops self-loops,
    /// collapses duplicates. Throws Error on an empty edge list.
    static DiGraph build(const RawEdgeList& raw);

    /// Builds over an existing dense id space. `raw_ids` (optional) carries the
    /// dense → raw mapping; when empty the identity is used.
    static DiGraph from_edges(std::size_t node_count, std::span<const Edge> edges, bool directed,
                              std::vector<RawId> raw_ids = {});

    std::size_t node_count() const noexcept { return node_count_; }
    /// Stored arcs: Σ|out_adj|. Equals edge_count() for directed graphs.
    std::size_t arc_count() const noexcept { return out_targets_.size(); }
    /// Logical edges: arcs for directed graphs, unordered pairs otherwise.
    std::size_t edge_count() const noexcept { return directed_ ? arc_count() : arc_count() / 2; }
    bool directed() const noexcept { return directed_; }

    std::span<const NodeId> out_neighbors(NodeId u) const noexcept {
        return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
    }
    std::span<const NodeId> in_neighbors(NodeId u) const noexcept {
        return {in_sources_.data() + in_offsets_[u], in_sources_.data() + in_offsets_[u + 1]};
    }
    /// Sorted in ∪ out neighbourhood.
    std::span<const NodeId> neighbors(NodeId u) const noexcept {
        return {und_targets_.data() + und_offsets_[u], und_targets_.data() + und_offsets_[u + 1]};
    }

    std::size_t out_degree(NodeId u) const noexcept { return out_offsets_[u + 1] - out_offsets_[u]; }
    std::size_t in_degree(NodeId u) const noexcept { return in_offsets_[u + 1] - in_offsets_[u]; }
    /// Number of arcs touching u in either direction (a reciprocated pair counts twice).
    std::size_t incident_count(NodeId u) const noexcept { return out_degree(u) + in_degree(u); }

    bool has_edge(NodeId u, NodeId v) const noexcept;
    bool valid(NodeId u) const noexcept { return u < node_count_; }

    RawId raw_id(NodeId u) const { return raw_ids_[u]; }
    std::optional<NodeId> dense_id(RawId raw) const;
    std::span<const RawId> raw_ids() const noexcept { return raw_ids_; }

    /// All stored arcs in (src, dst) order.
    std::vector<Edge> arcs() const;
    /// Logical edges: arcs() for directed graphs, pairs with src < dst otherwise.
    std::vector<Edge> edges() const;

private:
    std::size_t node_count_ = 0;
    bool directed_ = true;
    std::vector<std::size_t> out_offsets_{0};
    std::vector<NodeId> out_targets_;
    std::vector<std::size_t> in_offsets_{0};
    std::vector<NodeId> in_sources_;
    std::vector<std::size_t> und_offsets_{0};
    std::vector<NodeId> und_targets_;
    std::vector<RawId> raw_ids_;
    std::unordered_map<RawId, NodeId> dense_ids_;
};

/// Reusable scratch space for repeated BFS queries on graphs of up to
/// `node_count` nodes. Not shareable across threads.
class BfsWorkspace {
public:
    explicit BfsWorkspace(std::size_t node_count = 0);

private:
    friend std::optional<std::uint32_t> bfs_distance(const DiGraph&, NodeId, NodeId, std::uint32_t, bool,
                                                     bool, BfsWorkspace&);
    void reset(std::size_t node_count);

    std::vector<std::uint32_t> stamp_fwd_;
    std::vector<std::uint32_t> stamp_bwd_;
    std::vector<std::uint32_t> dist_fwd_;
    std::vector<std::uint32_t> dist_bwd_;
    std::vector<NodeId> frontier_fwd_;
    std::vector<NodeId> frontier_bwd_;
    std::vector<NodeId> next_;
    std::uint32_t epoch_ = 0;
};

inline constexpr std::uint32_t kUnboundedDepth = std::numeric_limits<std::uint32_t>::max();

/// Shortest-path length from src to dst, or nullopt if none within max_depth.
///
/// exclude_direct_edge removes the single edge (src, dst) from consideration
/// (both arcs when the graph is undirected). ignore_direction traverses arcs
/// either way. Runs a bidirectional search.
std::optional<std::uint32_t> bfs_distance(const DiGraph& g, NodeId src, NodeId dst, std::uint32_t max_depth,
                                          bool exclude_direct_edge, bool ignore_direction, BfsWorkspace& ws);
std::optional<std::uint32_t> bfs_distance(const DiGraph& g, NodeId src, NodeId dst,
                                          std::uint32_t max_depth = kUnboundedDepth,
                                          bool exclude_direct_edge = false, bool ignore_direction = false);

struct ComponentLabels {
    std::vector<std::uint32_t> label;
    std::uint32_t component_count = 0;
};

/// Labels are assigned 0, 1, ... in order of each component's lowest node id.
ComponentLabels weakly_connected_components(const DiGraph& g);

}  // namespace linkpred
