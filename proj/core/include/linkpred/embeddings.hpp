#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "linkpred/graph.hpp"
#include "linkpred/heuristics.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

struct WalkConfig {
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80;
    double p = 1.0;  // return parameter
    double q = 1.0;  // in-out parameter
    std::uint64_t seed = 0;

    void validate() const;
};

using Walk = std::vector<NodeId>;

/// Draws the successor of `current` given the previous node of the walk
/// (nullopt on the first step). Unnormalized weight of a candidate x is 1/p
/// when x == previous, 1 when previous→x is an arc, 1/q otherwise.
/// Returns nullopt at a sink.
std::optional<NodeId> next_step(const DiGraph& g, std::optional<NodeId> previous, NodeId current, double p,
                                double q, Rng& rng);

/// walks_per_node rounds; each round visits every node once in a seeded
/// shuffled order. Walks follow out-arcs and stop early at sinks. Every walk
/// has its own generator, so the result does not depend on `threads`.
std::vector<Walk> generate_walks(const DiGraph& g, const WalkConfig& cfg, unsigned threads = 1);

struct SkipGramConfig {
    std::size_t dim = 64;
    std::size_t window = 5;
    std::size_t negatives = 5;
    double initial_lr = 0.025;
    double min_lr = 1e-4;
    std::size_t epochs = 3;
    std::uint64_t seed = 0;
    /// 1 = deterministic. More threads run lock-free (Hogwild) updates whose
    /// result depends on scheduling.
    unsigned threads = 1;

    void validate() const;
};

/// Node vectors learned by skip-gram. `vectors` are the centre ("input")
/// vectors used downstream; `context` is the output layer.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t nodes, std::size_t dim);

    std::size_t nodes() const noexcept { return nodes_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<float> row(NodeId u) noexcept { return {vectors_.data() + std::size_t{u} * dim_, dim_}; }
    std::span<const float> row(NodeId u) const noexcept { return {vectors_.data() + std::size_t{u} * dim_, dim_}; }
    std::span<float> context_row(NodeId u) noexcept { return {context_.data() + std::size_t{u} * dim_, dim_}; }

    std::vector<float>& vectors() noexcept { return vectors_; }
    const std::vector<float>& vectors() const noexcept { return vectors_; }
    std::vector<float>& context() noexcept { return context_; }

    /// Drops the output layer once training is over.
    void discard_context() { context_.clear(); context_.shrink_to_fit(); }

private:
    std::size_t nodes_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> vectors_;
    std::vector<float> context_;
};

struct SkipGramResult {
    EmbeddingMatrix embedding;
    /// Mean negative-sampling loss per (centre, context) pair, one entry per epoch.
    std::vector<double> epoch_loss;
};

/// Skip-gram with negative sampling over the walk corpus. Negatives come from
/// the unigram^0.75 distribution; the learning rate decays linearly to min_lr.
SkipGramResult train_skipgram(std::span<const Walk> walks, std::size_t node_count, const SkipGramConfig& cfg);

/// Element-wise product of the centre vectors of u and v.
std::vector<double> edge_embedding(const EmbeddingMatrix& e, NodeId u, NodeId v);

/// (h₀..h₅₅, r₀..r_{dim-1}). Throws Error if r.size() != declared_dim.
std::vector<double> combine_features(const HeuristicVector& h, std::span<const double> r, std::size_t declared_dim);

/// Text layout: first line `N dim`, then `id v₀ … v_{dim-1}` per node.
void write_embeddings(std::ostream& out, const EmbeddingMatrix& e);
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& e);
EmbeddingMatrix read_embeddings(std::istream& in);
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

}  // namespace linkpred
