#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linkpred/graph.hpp"
#include "linkpred/sampling.hpp"

namespace linkpred {

struct HeuristicConfig {
    double pagerank_damping = 0.85;
    double pagerank_tol = 1e-6;
    double katz_alpha = 0.1;
    double katz_beta = 1.0;
    double katz_tol = 1e-6;
    double hits_tol = 1e-8;
    std::size_t max_iters = 1000;
    std::size_t svd_rank = 6;
    double missing_path_sentinel = -1.0;
    std::uint64_t svd_seed = 0;

    /// Throws Error when a field is out of range.
    void validate() const;
};

/// Output of a fixed-point iteration. `converged == false` means the last
/// iterate is returned after max_iters.
struct IterativeResult {
    std::vector<double> values;
    std::size_t iterations = 0;
    bool converged = false;
};

struct HitsResult {
    std::vector<double> hub;
    std::vector<double> authority;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Power iteration with uniform teleport and uniform redistribution of
/// dangling mass. Stops when the L1 change drops below pagerank_tol.
IterativeResult compute_pagerank(const DiGraph& g, const HeuristicConfig& cfg);

/// x ← α·Aᵀx + β·1 from x = 0 until Σ|Δx| < tol·N, then L2-normalized.
/// Throws DivergenceError once ‖x‖ exceeds 1e12.
IterativeResult compute_katz(const DiGraph& g, const HeuristicConfig& cfg);

/// a ← Aᵀh, h ← A·a with L1 normalization each step, from h = 1/N.
HitsResult compute_hits(const DiGraph& g, const HeuristicConfig& cfg);

/// Rank-k truncated SVD of the binary adjacency matrix, A ≈ U·diag(S)·V.
struct SvdFactors {
    Eigen::MatrixXd u;  // N × k
    Eigen::VectorXd s;  // k, descending
    Eigen::MatrixXd v;  // k × N, column j belongs to node j
    std::size_t power_iterations = 0;

    std::size_t rank() const noexcept { return static_cast<std::size_t>(s.size()); }
};

/// Randomized subspace iteration: Gaussian test matrix with 8 columns of
/// oversampling, at least 7 power iterations (continued until the Ritz values
/// settle), then Rayleigh-Ritz on the captured subspace. Each left singular
/// vector is signed so its largest-magnitude entry is non-negative.
SvdFactors compute_svd(const DiGraph& g, std::size_t k, std::uint64_t seed);

struct SetSimilarity {
    double jaccard = 0.0;
    double cosine = 0.0;
};

/// Inputs must be sorted and duplicate-free. Both scores are 0 when either set is empty.
SetSimilarity set_similarity(std::span<const NodeId> a, std::span<const NodeId> b);

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b);

/// Σ 1/ln|Γ(w)| over common undirected neighbours w; terms with |Γ(w)| <= 1 are skipped.
double adamic_adar(const DiGraph& g, NodeId u, NodeId v);

/// w_in = 1/√(1+indeg(v)), w_out = 1/√(1+outdeg(u)), followed by
/// w_in+w_out, w_in·w_out, 2w_in+w_out, w_in+2w_out.
std::array<double, 6> weight_features(const DiGraph& g, NodeId u, NodeId v);

inline constexpr std::size_t kHeuristicDim = 56;
using HeuristicVector = std::array<double, kHeuristicDim>;

/// Named offsets into HeuristicVector.
namespace slot {
inline constexpr std::size_t jaccard_followers = 0;
inline constexpr std::size_t jaccard_followees = 1;
inline constexpr std::size_t cosine_followers = 2;
inline constexpr std::size_t cosine_followees = 3;
inline constexpr std::size_t pagerank_src = 4;
inline constexpr std::size_t pagerank_dst = 5;
inline constexpr std::size_t shortest_path = 6;
inline constexpr std::size_t same_community = 7;
inline constexpr std::size_t follows_back = 8;
inline constexpr std::size_t adamic_adar = 9;
inline constexpr std::size_t katz_src = 10;
inline constexpr std::size_t katz_dst = 11;
inline constexpr std::size_t auth_src = 12;
inline constexpr std::size_t auth_dst = 13;
inline constexpr std::size_t hub_src = 14;
inline constexpr std::size_t hub_dst = 15;
inline constexpr std::size_t followers_src = 16;
inline constexpr std::size_t followees_src = 17;
inline constexpr std::size_t followers_dst = 18;
inline constexpr std::size_t followees_dst = 19;
inline constexpr std::size_t common_followers = 20;
inline constexpr std::size_t common_followees = 21;
inline constexpr std::size_t weights = 22;  // 6 slots
inline constexpr std::size_t svd_u_src = 28;
inline constexpr std::size_t svd_u_dst = 34;
inline constexpr std::size_t svd_v_src = 40;
inline constexpr std::size_t svd_v_dst = 46;
inline constexpr std::size_t svd_u_dot = 52;
inline constexpr std::size_t svd_v_dot = 53;
inline constexpr std::size_t in_degree_product = 54;
inline constexpr std::size_t out_degree_product = 55;
}  // namespace slot

struct NodeScores {
    std::vector<double> pagerank;
    std::vector<double> katz;
    std::vector<double> hub;
    std::vector<double> authority;
};

/// Precomputed per-graph state for the 56-slot features. Holds a reference to
/// the graph, which must outlive the featurizer.
class HeuristicFeaturizer {
public:
    /// Throws Error when any artifact's node count differs from the graph's,
    /// or when the SVD rank is not 6.
    HeuristicFeaturizer(const DiGraph& g, NodeScores scores, SvdFactors svd, ComponentLabels components,
                        double missing_path_sentinel = -1.0);

    /// Runs every precomputation (PageRank, Katz, HITS, SVD, components) on g.
    /// Non-converged iterations are reported in `warnings`.
    static HeuristicFeaturizer fit(const DiGraph& g, const HeuristicConfig& cfg);

    HeuristicVector featurize(NodeId u, NodeId v, BfsWorkspace& ws) const;
    HeuristicVector featurize(NodeId u, NodeId v) const;

    const DiGraph& graph() const noexcept { return *graph_; }
    const NodeScores& scores() const noexcept { return scores_; }
    const SvdFactors& svd() const noexcept { return svd_; }
    const ComponentLabels& components() const noexcept { return components_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    const DiGraph* graph_;
    NodeScores scores_;
    SvdFactors svd_;
    ComponentLabels components_;
    double sentinel_;
    std::vector<std::string> warnings_;
};

/// Row-major |edges| × cols feature block plus labels.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> labels;

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
};

/// One featurize() row per edge, in input order. Rows are split across
/// `threads` workers; output does not depend on the thread count.
FeatureMatrix featurize_edges(const HeuristicFeaturizer& featurizer, std::span<const LabeledEdge> edges,
                              unsigned threads = 1);

/// Fits a featurizer on g and featurizes `edges`.
FeatureMatrix featurize_dataset(const DiGraph& g, std::span<const LabeledEdge> edges, const HeuristicConfig& cfg,
                                unsigned threads = 1);

}  // namespace linkpred
