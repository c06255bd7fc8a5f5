#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "linkpred/config.hpp"
#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"
#include "linkpred/sampling.hpp"

namespace linkpred {

/// Wraps a failure with the name of the stage it happened in.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineContext {
    PipelineConfig config;
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    std::ostream* log = nullptr;  // progress messages; null silences them
};

/// File names inside out_dir.
namespace artifact {
inline constexpr const char* graph = "graph.txt";
inline constexpr const char* stats = "stats.txt";
inline constexpr const char* split_train = "split_train.txt";
inline constexpr const char* split_test = "split_test.txt";
inline constexpr const char* embeddings = "embeddings.txt";
inline constexpr const char* embeddings_meta = "embeddings.meta";
inline constexpr const char* features_train = "features_train.csv";
inline constexpr const char* features_test = "features_test.csv";
inline constexpr const char* model = "model.txt";
inline constexpr const char* metrics = "metrics.txt";
inline constexpr const char* runtime = "runtime.txt";
}  // namespace artifact

/// The `# linkpred stage=... seed=... config_hash=...` line every artifact
/// starts with, plus any further key=value pairs on `#` lines.
struct ArtifactHeader {
    std::string stage;
    std::string config_hash;
    std::map<std::string, std::string> values;
};

ArtifactHeader read_artifact_header(const std::filesystem::path& path);

struct IngestStats {
    std::size_t raw_edges = 0;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t components = 0;
    bool directed = true;
};

/// Graph artifact: raw id table followed by dense-id edges, so dense ids
/// survive a round trip unchanged.
void write_graph(const std::filesystem::path& path, const DiGraph& g, const std::string& header);
DiGraph read_graph(const std::filesystem::path& path);

/// Loads the dataset file named by the config. `.csv` files may carry a header.
DiGraph load_dataset(const PipelineConfig& config, IngestStats* stats = nullptr);

/// Rebuilds the split from the two split artifacts of out_dir.
SplitDataset load_split(const PipelineContext& ctx, const DiGraph& g);

/// Feature rows with named column blocks (H, R, S, D).
Dataset read_features(const std::filesystem::path& path);

IngestStats cmd_ingest(const PipelineContext& ctx);
SplitDataset cmd_split(const PipelineContext& ctx);
void cmd_embed(const PipelineContext& ctx);
/// Returns the feature width (H and R columns; 120 in combined mode at dim 64).
std::size_t cmd_features(const PipelineContext& ctx);
TrainResult cmd_train(const PipelineContext& ctx);
Metrics cmd_eval(const PipelineContext& ctx);

struct RunOptions {
    /// Recompute every stage even when a matching artifact exists.
    bool fresh = false;
};

struct RunReport {
    Metrics metrics;
    double runtime_seconds = 0.0;
    std::map<std::string, bool> reused;  // stage → artifact reused
};

/// ingest → split → embed (when needed) → features → train → eval. Stages
/// whose artifacts already carry the current config hash are reused.
RunReport cmd_run(const PipelineContext& ctx, const RunOptions& options = {});

}  // namespace linkpred
