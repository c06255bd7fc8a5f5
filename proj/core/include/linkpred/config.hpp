#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "linkpred/embeddings.hpp"
#include "linkpred/heuristics.hpp"
#include "linkpred/model.hpp"

namespace linkpred {

enum class FeatureMode { heuristic, embedding, combined };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

/// Pipeline stages in dependency order. Each artifact carries the hash of the
/// configuration keys its stage (and every upstream stage) reads.
enum class Stage { graph, split, embed, features, model };

/// Flat `section.key=value` configuration. Unknown keys are rejected.
///
///     dataset.path=data/wiki-Vote.txt
///     dataset.directed=true
///     seed=7
///     walk.length=80
///     model.arch=e(f4(H), f4(R))
struct PipelineConfig {
    std::filesystem::path dataset_path;
    bool directed = true;
    double test_fraction = 0.1;
    std::uint64_t seed = 42;
    HeuristicConfig heuristics;
    WalkConfig walk;
    SkipGramConfig skipgram;
    TrainConfig train;
    FeatureMode feature_mode = FeatureMode::heuristic;
    /// Also emit the raw source/destination vectors as inputs S and D.
    bool node_vectors = false;
    bool logistic = false;
    /// Empty selects the mode default: H, R or H | R.
    std::string architecture;
    ArchitectureOptions arch_options;

    static PipelineConfig parse(std::istream& in);
    static PipelineConfig load(const std::filesystem::path& path);

    /// Sets one key from its text form. Throws Error on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    void validate() const;

    bool uses_heuristics() const noexcept { return feature_mode != FeatureMode::embedding; }
    bool uses_embeddings() const noexcept { return feature_mode != FeatureMode::heuristic || node_vectors; }
    std::string effective_architecture() const;

    /// Every key in canonical text form, sorted.
    std::map<std::string, std::string> entries() const;
    /// 16 hex digits of FNV-1a over the keys that `stage` depends on.
    std::string hash(Stage stage) const;

    /// Stage seeds derived from the global seed.
    std::uint64_t split_seed() const noexcept { return seed; }
    std::uint64_t svd_seed() const noexcept;
    std::uint64_t walk_seed() const noexcept;
    std::uint64_t skipgram_seed() const noexcept;
    std::uint64_t train_seed() const noexcept;
};

}  // namespace linkpred
