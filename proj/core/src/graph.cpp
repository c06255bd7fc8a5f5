#include "linkpred/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>
#include <string_view>

#include "linkpred/errors.hpp"

namespace linkpred {

namespace {

bool is_separator(char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; }

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_separator(line[i])) ++i;
        std::size_t start = i;
        while (i < line.size() && !is_separator(line[i])) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

std::optional<RawId> to_integer(std::string_view token) {
    RawId value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

// Builds a CSR from (key, value) pairs already sorted by key then value.
void fill_csr(std::size_t n, const std::vector<Edge>& sorted, bool by_src, std::vector<std::size_t>& offsets,
              std::vector<NodeId>& targets) {
    offsets.assign(n + 1, 0);
    targets.clear();
    targets.reserve(sorted.size());
    for (const Edge& e : sorted) {
        ++offsets[(by_src ? e.src : e.dst) + 1];
        targets.push_back(by_src ? e.dst : e.src);
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
}

}  // namespace

RawEdgeList parse_edge_list(std::istream& in, const ParseOptions& options) {
    RawEdgeList out;
    out.directed = options.directed;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || view[first] == '#') continue;
        auto tokens = tokenize(view);
        if (tokens.size() != 2) {
            throw ParseError(line_no, "expected 2 tokens, found " + std::to_string(tokens.size()));
        }
        auto a = to_integer(tokens[0]);
        auto b = to_integer(tokens[1]);
        if (!a || !b) {
            if (options.allow_header && !seen_data && !a && !b) {
                seen_data = true;
                continue;
            }
            throw ParseError(line_no, "non-integer node id '" + std::string(!a ? tokens[0] : tokens[1]) + "'");
        }
        seen_data = true;
        out.edges.emplace_back(*a, *b);
    }
    return out;
}

RawEdgeList read_edge_list_file(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open edge list '" + path.string() + "'");
    return parse_edge_list(in, options);
}

DiGraph DiGraph::build(const RawEdgeList& raw) {
    if (raw.edges.empty()) throw Error("edge list is empty");
    std::unordered_map<RawId, NodeId> ids;
    std::vector<RawId> raw_ids;
    auto intern = [&](RawId r) {
        auto [it, inserted] = ids.try_emplace(r, static_cast<NodeId>(raw_ids.size()));
        if (inserted) raw_ids.push_back(r);
        return it->second;
    };
    std::vector<Edge> edges;
    edges.reserve(raw.edges.size());
    for (auto [a, b] : raw.edges) {
        NodeId u = intern(a);
        NodeId v = intern(b);
        edges.push_back({u, v});
    }
    std::size_t n = raw_ids.size();
    return from_edges(n, edges, raw.directed, std::move(raw_ids));
}

DiGraph DiGraph::from_edges(std::size_t node_count, std::span<const Edge> edges, bool directed,
                            std::vector<RawId> raw_ids) {
    DiGraph g;
    g.node_count_ = node_count;
    g.directed_ = directed;
    if (raw_ids.empty()) {
        raw_ids.resize(node_count);
        std::iota(raw_ids.begin(), raw_ids.end(), RawId{0});
    }
    if (raw_ids.size() != node_count) throw Error("raw id table does not match node count");
    g.raw_ids_ = std::move(raw_ids);
    g.dense_ids_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) g.dense_ids_.emplace(g.raw_ids_[i], static_cast<NodeId>(i));

    std::vector<Edge> arcs;
    arcs.reserve(directed ? edges.size() : 2 * edges.size());
    for (const Edge& e : edges) {
        if (e.src >= node_count || e.dst >= node_count) throw Error("edge endpoint out of range");
        if (e.src == e.dst) continue;
        arcs.push_back(e);
        if (!directed) arcs.push_back({e.dst, e.src});
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    fill_csr(node_count, arcs, true, g.out_offsets_, g.out_targets_);

    std::vector<Edge> by_dst = arcs;
    std::sort(by_dst.begin(), by_dst.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.dst, a.src) < std::tie(b.dst, b.src); });
    fill_csr(node_count, by_dst, false, g.in_offsets_, g.in_sources_);

    std::vector<Edge> both;
    both.reserve(2 * arcs.size());
    for (const Edge& e : arcs) {
        both.push_back(e);
        both.push_back({e.dst, e.src});
    }
    std::sort(both.begin(), both.end());
    both.erase(std::unique(both.begin(), both.end()), both.end());
    fill_csr(node_count, both, true, g.und_offsets_, g.und_targets_);
    return g;
}

bool DiGraph::has_edge(NodeId u, NodeId v) const noexcept {
    if (u >= node_count_ || v >= node_count_) return false;
    auto out = out_neighbors(u);
    return std::binary_search(out.begin(), out.end(), v);
}

std::optional<NodeId> DiGraph::dense_id(RawId raw) const {
    auto it = dense_ids_.find(raw);
    if (it == dense_ids_.end()) return std::nullopt;
    return it->second;
}

std::vector<Edge> DiGraph::arcs() const {
    std::vector<Edge> out;
    out.reserve(arc_count());
    for (NodeId u = 0; u < node_count_; ++u) {
        for (NodeId v : out_neighbors(u)) out.push_back({u, v});
    }
    return out;
}

std::vector<Edge> DiGraph::edges() const {
    if (directed_) return arcs();
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count_; ++u) {
        for (NodeId v : out_neighbors(u)) {
            if (u < v) out.push_back({u, v});
        }
    }
    return out;
}

BfsWorkspace::BfsWorkspace(std::size_t node_count) { reset(node_count); }

void BfsWorkspace::reset(std::size_t node_count) {
    stamp_fwd_.assign(node_count, 0);
    stamp_bwd_.assign(node_count, 0);
    dist_fwd_.assign(node_count, 0);
    dist_bwd_.assign(node_count, 0);
    epoch_ = 0;
}

std::optional<std::uint32_t> bfs_distance(const DiGraph& g, NodeId src, NodeId dst, std::uint32_t max_depth,
                                          bool exclude_direct_edge, bool ignore_direction, BfsWorkspace& ws) {
    if (!g.valid(src) || !g.valid(dst)) throw Error("bfs_distance: node id out of range");
    if (src == dst) return 0;
    if (max_depth == 0) return std::nullopt;
    if (ws.stamp_fwd_.size() != g.node_count() || ws.epoch_ == std::numeric_limits<std::uint32_t>::max()) {
        ws.reset(g.node_count());
    }
    const std::uint32_t epoch = ++ws.epoch_;

    // The only step a shortest src→dst path can take between the two endpoints
    // is src→dst itself. It is usable unless excluded; with ignore_direction on
    // a directed graph the reverse arc still provides the step.
    const bool direct_step_blocked =
        exclude_direct_edge && !(ignore_direction && g.directed() && g.has_edge(dst, src));

    auto forward_of = [&](NodeId x) { return ignore_direction ? g.neighbors(x) : g.out_neighbors(x); };
    auto backward_of = [&](NodeId x) { return ignore_direction ? g.neighbors(x) : g.in_neighbors(x); };

    ws.frontier_fwd_.assign(1, src);
    ws.frontier_bwd_.assign(1, dst);
    ws.stamp_fwd_[src] = epoch;
    ws.dist_fwd_[src] = 0;
    ws.stamp_bwd_[dst] = epoch;
    ws.dist_bwd_[dst] = 0;
    std::uint32_t depth_fwd = 0;
    std::uint32_t depth_bwd = 0;

    while (!ws.frontier_fwd_.empty() && !ws.frontier_bwd_.empty()) {
        if (depth_fwd + depth_bwd >= max_depth) return std::nullopt;
        const bool expand_forward = ws.frontier_fwd_.size() <= ws.frontier_bwd_.size();
        auto& frontier = expand_forward ? ws.frontier_fwd_ : ws.frontier_bwd_;
        auto& stamp = expand_forward ? ws.stamp_fwd_ : ws.stamp_bwd_;
        auto& dist = expand_forward ? ws.dist_fwd_ : ws.dist_bwd_;
        const auto& other_stamp = expand_forward ? ws.stamp_bwd_ : ws.stamp_fwd_;
        const auto& other_dist = expand_forward ? ws.dist_bwd_ : ws.dist_fwd_;
        std::uint32_t& depth = expand_forward ? depth_fwd : depth_bwd;

        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        ws.next_.clear();
        for (NodeId x : frontier) {
            auto nbrs = expand_forward ? forward_of(x) : backward_of(x);
            for (NodeId y : nbrs) {
                if (direct_step_blocked) {
                    bool is_direct = expand_forward ? (x == src && y == dst) : (x == dst && y == src);
                    if (is_direct) continue;
                }
                if (other_stamp[y] == epoch) {
                    best = std::min(best, depth + 1 + other_dist[y]);
                }
                if (stamp[y] != epoch) {
                    stamp[y] = epoch;
                    dist[y] = depth + 1;
                    ws.next_.push_back(y);
                }
            }
        }
        ++depth;
        if (best != std::numeric_limits<std::uint32_t>::max()) {
            if (best > max_depth) return std::nullopt;
            return best;
        }
        frontier.swap(ws.next_);
    }
    return std::nullopt;
}

std::optional<std::uint32_t> bfs_distance(const DiGraph& g, NodeId src, NodeId dst, std::uint32_t max_depth,
                                          bool exclude_direct_edge, bool ignore_direction) {
    BfsWorkspace ws(g.node_count());
    return bfs_distance(g, src, dst, max_depth, exclude_direct_edge, ignore_direction, ws);
}

ComponentLabels weakly_connected_components(const DiGraph& g) {
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    ComponentLabels out;
    out.label.assign(g.node_count(), kUnset);
    std::vector<NodeId> stack;
    for (NodeId root = 0; root < g.node_count(); ++root) {
        if (out.label[root] != kUnset) continue;
        const std::uint32_t id = out.component_count++;
        out.label[root] = id;
        stack.assign(1, root);
        while (!stack.empty()) {
            NodeId x = stack.back();
            stack.pop_back();
            for (NodeId y : g.neighbors(x)) {
                if (out.label[y] == kUnset) {
                    out.label[y] = id;
                    stack.push_back(y);
                }
            }
        }
    }
    return out;
}

}  // namespace linkpred
