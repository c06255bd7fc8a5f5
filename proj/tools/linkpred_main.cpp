#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linkpred/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out_dir = "linkpred-out";
    std::vector<std::string> overrides;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* opt = cmd->add_option("--config", flags.config, "key=value configuration file");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "override the global seed");
    cmd->add_option("--threads", flags.threads, "worker threads (1 = deterministic)")->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", flags.out_dir, "artifact directory");
    cmd->add_option("--set", flags.overrides, "extra key=value override (repeatable)");
    cmd->add_flag("-q,--quiet", flags.quiet, "suppress progress messages");
}

linkpred::PipelineContext make_context(const CommonFlags& flags) {
    linkpred::PipelineContext ctx;
    if (!flags.config.empty()) ctx.config = linkpred::PipelineConfig::load(flags.config);
    for (const auto& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw linkpred::Error("--set expects key=value, got '" + kv + "'");
        ctx.config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (flags.seed) ctx.config.seed = *flags.seed;
    ctx.config.validate();
    ctx.out_dir = flags.out_dir;
    ctx.threads = flags.threads;
    ctx.log = flags.quiet ? nullptr : &std::cerr;
    return ctx;
}

void print_metrics(const linkpred::Metrics& m, std::optional<double> runtime) {
    linkpred::write_metrics(std::cout, m);
    if (runtime) std::cout << "runtime_seconds=" << *runtime << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link prediction pipeline for social graphs"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto* ingest = app.add_subcommand("ingest", "parse an edge list into the graph artifact");
    add_common(ingest, flags, false);
    std::string dataset;
    std::optional<bool> directed;
    ingest->add_option("--dataset", dataset, "edge-list file (overrides dataset.path)");
    ingest->add_option("--directed", directed, "treat edges as directed (true/false)");

    auto* split = app.add_subcommand("split", "build the labeled train/test split");
    auto* embed = app.add_subcommand("embed", "learn random-walk node embeddings");
    auto* features = app.add_subcommand("features", "write feature matrices for the split");
    auto* train = app.add_subcommand("train", "fit the classifier");
    auto* eval = app.add_subcommand("eval", "score the test split");
    auto* run = app.add_subcommand("run", "all stages, reusing matching artifacts");
    for (auto* cmd : {split, embed, features, train, eval, run}) add_common(cmd, flags, true);
    bool fresh = false;
    run->add_flag("--fresh", fresh, "recompute every stage");

    CLI11_PARSE(app, argc, argv);

    try {
        auto ctx = make_context(flags);
        if (ingest->parsed()) {
            if (!dataset.empty()) ctx.config.dataset_path = dataset;
            if (directed) ctx.config.directed = *directed;
            const auto stats = linkpred::cmd_ingest(ctx);
            std::cout << "nodes=" << stats.nodes << "\nedges=" << stats.edges << '\n';
        } else if (split->parsed()) {
            linkpred::cmd_split(ctx);
        } else if (embed->parsed()) {
            linkpred::cmd_embed(ctx);
        } else if (features->parsed()) {
            linkpred::cmd_features(ctx);
        } else if (train->parsed()) {
            linkpred::cmd_train(ctx);
        } else if (eval->parsed()) {
            print_metrics(linkpred::cmd_eval(ctx), std::nullopt);
        } else if (run->parsed()) {
            const auto report = linkpred::cmd_run(ctx, {.fresh = fresh});
            print_metrics(report.metrics, report.runtime_seconds);
        }
    } catch (const std::exception& e) {
        std::cerr << "linkpred: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
