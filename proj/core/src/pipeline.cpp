#include "linkpred/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "linkpred/embeddings.hpp"
#include "linkpred/heuristics.hpp"

namespace linkpred {

namespace fs = std::filesystem;

namespace {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::graph: return "ingest";
        case Stage::split: return "split";
        case Stage::embed: return "embed";
        case Stage::features: return "features";
        case Stage::model: return "train";
    }
    return "?";
}

void say(const PipelineContext& ctx, const std::string& msg) {
    if (ctx.log) *ctx.log << msg << std::endl;
}

std::string provenance(const PipelineContext& ctx, Stage stage) {
    return "linkpred stage=" + std::string(stage_name(stage)) + " seed=" + std::to_string(ctx.config.seed) +
           " config_hash=" + ctx.config.hash(stage);
}

template <class F>
auto in_stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return in;
}

bool header_matches(const fs::path& path, const std::string& hash) {
    if (!fs::exists(path)) return false;
    try {
        return read_artifact_header(path).config_hash == hash;
    } catch (const Error&) {
        return false;
    }
}

// Loads the header of an upstream artifact and refuses it when it was made
// under a different configuration.
ArtifactHeader require(const PipelineContext& ctx, const char* file, Stage stage) {
    const fs::path path = ctx.out_dir / file;
    if (!fs::exists(path)) {
        throw Error("missing artifact '" + path.string() + "'; run the '" + stage_name(stage) + "' stage first");
    }
    auto header = read_artifact_header(path);
    const auto expected = ctx.config.hash(stage);
    if (header.config_hash != expected) {
        throw Error("artifact '" + path.string() + "' has config hash " +
                    (header.config_hash.empty() ? std::string("<none>") : header.config_hash) +
                    " but the current config hashes to " + expected + "; rerun the '" + stage_name(stage) +
                    "' stage");
    }
    return header;
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
    out.append(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void write_split_file(const fs::path& path, const std::string& header, const SplitDataset& ds,
                      const std::vector<LabeledEdge>& edges) {
    auto out = open_out(path);
    out << "# " << header << '\n';
    out << "# test_fraction=" << ds.test_fraction << " positive_shortfall=" << ds.positive_shortfall
        << " negative_shortfall=" << ds.negative_shortfall
        << " cross_component_negatives=" << ds.cross_component_negatives << '\n';
    for (const auto& e : edges) {
        out << ds.train_graph.raw_id(e.src) << ' ' << ds.train_graph.raw_id(e.dst) << ' ' << int{e.label} << '\n';
    }
}

std::vector<LabeledEdge> read_split_file(const fs::path& path, const DiGraph& g) {
    auto in = open_in(path);
    std::vector<LabeledEdge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream s(line);
        RawId a = 0;
        RawId b = 0;
        int label = 0;
        if (!(s >> a >> b >> label) || (label != 0 && label != 1)) {
            throw ParseError(line_no, "expected `src dst label` in '" + path.string() + "'");
        }
        auto u = g.dense_id(a);
        auto v = g.dense_id(b);
        if (!u || !v) throw ParseError(line_no, "node id not present in the graph artifact");
        edges.push_back({*u, *v, static_cast<std::uint8_t>(label)});
    }
    return edges;
}

std::size_t size_value(const ArtifactHeader& h, const std::string& key) {
    auto it = h.values.find(key);
    return it == h.values.end() ? 0 : static_cast<std::size_t>(std::stoull(it->second));
}

void write_feature_file(const fs::path& path, const std::string& header, std::span<const LabeledEdge> edges,
                        const FeatureMatrix* heuristics, const EmbeddingMatrix* emb, bool hadamard, bool node_vectors) {
    auto out = open_out(path);
    out << "# " << header << '\n';
    std::string line;
    const std::size_t dim = emb ? emb->dim() : 0;
    if (heuristics) {
        for (std::size_t i = 0; i < kHeuristicDim; ++i) line += ",h" + std::to_string(i);
    }
    if (hadamard) {
        for (std::size_t i = 0; i < dim; ++i) line += ",r" + std::to_string(i);
    }
    if (node_vectors) {
        for (std::size_t i = 0; i < dim; ++i) line += ",s" + std::to_string(i);
        for (std::size_t i = 0; i < dim; ++i) line += ",d" + std::to_string(i);
    }
    // Every mode emits at least one column, so the leading comma is always there.
    out << std::string_view(line).substr(1) << ",label\n";
    for (std::size_t r = 0; r < edges.size(); ++r) {
        const auto& e = edges[r];
        line.clear();
        if (heuristics) {
            for (double v : heuristics->row(r)) {
                line += ',';
                append_number(line, v);
            }
        }
        if (hadamard) {
            for (double v : edge_embedding(*emb, e.src, e.dst)) {
                line += ',';
                append_number(line, v);
            }
        }
        if (node_vectors) {
            for (float v : emb->row(e.src)) {
                line += ',';
                append_number(line, v);
            }
            for (float v : emb->row(e.dst)) {
                line += ',';
                append_number(line, v);
            }
        }
        line += e.label ? ",1\n" : ",0\n";
        out << std::string_view(line).substr(1);
    }
    if (!out) throw Error("failed while writing '" + path.string() + "'");
}

EmbeddingMatrix load_embeddings(const PipelineContext& ctx, std::size_t node_count) {
    require(ctx, artifact::embeddings_meta, Stage::embed);
    auto e = read_embeddings(ctx.out_dir / artifact::embeddings);
    if (e.nodes() != node_count) {
        throw Error("embeddings cover " + std::to_string(e.nodes()) + " nodes, graph has " +
                    std::to_string(node_count));
    }
    return e;
}

}  // namespace

ArtifactHeader read_artifact_header(const fs::path& path) {
    auto in = open_in(path);
    ArtifactHeader h;
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
        std::istringstream s(line.substr(1));
        std::string token;
        while (s >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            h.values[token.substr(0, eq)] = token.substr(eq + 1);
        }
    }
    if (auto it = h.values.find("stage"); it != h.values.end()) h.stage = it->second;
    if (auto it = h.values.find("config_hash"); it != h.values.end()) h.config_hash = it->second;
    return h;
}

void write_graph(const fs::path& path, const DiGraph& g, const std::string& header) {
    auto out = open_out(path);
    out << "# " << header << '\n';
    out << "linkpred-graph 1\n";
    out << "directed " << (g.directed() ? 1 : 0) << '\n';
    out << "nodes " << g.node_count() << '\n';
    for (RawId r : g.raw_ids()) out << r << '\n';
    const auto edges = g.edges();
    out << "edges " << edges.size() << '\n';
    for (const auto& e : edges) out << e.src << ' ' << e.dst << '\n';
}

DiGraph read_graph(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    while (in.peek() == '#') std::getline(in, line);
    std::string key;
    int version = 0;
    int directed = 0;
    std::size_t nodes = 0;
    if (!(in >> key >> version) || key != "linkpred-graph" || version != 1) {
        throw Error("'" + path.string() + "' is not a graph artifact");
    }
    if (!(in >> key >> directed) || key != "directed" || !(in >> key >> nodes) || key != "nodes") {
        throw Error("'" + path.string() + "': bad graph header");
    }
    std::vector<RawId> raw(nodes);
    for (auto& r : raw) {
        if (!(in >> r)) throw Error("'" + path.string() + "': truncated id table");
    }
    std::size_t count = 0;
    if (!(in >> key >> count) || key != "edges") throw Error("'" + path.string() + "': missing edge block");
    std::vector<Edge> edges(count);
    for (auto& e : edges) {
        if (!(in >> e.src >> e.dst) || e.src >= nodes || e.dst >= nodes) {
            throw Error("'" + path.string() + "': bad edge line");
        }
    }
    return DiGraph::from_edges(nodes, edges, directed != 0, std::move(raw));
}

DiGraph load_dataset(const PipelineConfig& config, IngestStats* stats) {
    if (config.dataset_path.empty()) throw Error("no dataset given (set dataset.path)");
    ParseOptions opts;
    opts.directed = config.directed;
    opts.allow_header = config.dataset_path.extension() == ".csv";
    const auto raw = read_edge_list_file(config.dataset_path, opts);
    auto g = DiGraph::build(raw);
    if (stats) {
        stats->raw_edges = raw.edges.size();
        stats->self_loops = 0;
        for (const auto& [a, b] : raw.edges) stats->self_loops += a == b;
        stats->nodes = g.node_count();
        stats->edges = g.edge_count();
        stats->duplicates = stats->raw_edges - stats->self_loops - stats->edges;
        stats->components = weakly_connected_components(g).component_count;
        stats->directed = g.directed();
    }
    return g;
}

SplitDataset load_split(const PipelineContext& ctx, const DiGraph& g) {
    const auto header = require(ctx, artifact::split_train, Stage::split);
    require(ctx, artifact::split_test, Stage::split);
    SplitDataset ds;
    ds.seed = ctx.config.split_seed();
    ds.test_fraction = ctx.config.test_fraction;
    ds.positive_shortfall = size_value(header, "positive_shortfall");
    ds.negative_shortfall = size_value(header, "negative_shortfall");
    ds.cross_component_negatives = size_value(header, "cross_component_negatives");
    ds.train = read_split_file(ctx.out_dir / artifact::split_train, g);
    ds.test = read_split_file(ctx.out_dir / artifact::split_test, g);
    std::vector<Edge> positives;
    for (const auto& e : ds.train) {
        if (e.label) positives.push_back({e.src, e.dst});
    }
    ds.train_graph = DiGraph::from_edges(g.node_count(), positives, g.directed(),
                                         std::vector<RawId>(g.raw_ids().begin(), g.raw_ids().end()));
    return ds;
}

Dataset read_features(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '#') break;
    }
    const auto names = split_fields(line, ',');
    if (names.size() < 2 || names.back() != "label") {
        throw ParseError(line_no, "feature file '" + path.string() + "' lacks a header ending in label");
    }
    Dataset data;
    const std::size_t width = names.size() - 1;
    for (std::size_t c = 0; c < width; ++c) {
        const auto name = names[c];
        if (name.empty()) throw ParseError(line_no, "empty column name");
        const std::string slot(1, static_cast<char>(std::toupper(static_cast<unsigned char>(name[0]))));
        if (data.slots.empty() || data.slots.back().name != slot) data.slots.push_back({slot, c, 0});
        ++data.slots.back().dim;
    }

    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line, ',');
        if (fields.size() != names.size()) {
            throw ParseError(line_no, "expected " + std::to_string(names.size()) + " columns");
        }
        for (std::size_t c = 0; c < width; ++c) {
            const auto f = fields[c];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || ptr != f.data() + f.size()) throw ParseError(line_no, "bad number");
            values.push_back(v);
        }
        const auto label = fields.back();
        if (label != "0" && label != "1") throw ParseError(line_no, "label must be 0 or 1");
        data.labels.push_back(label == "1" ? 1 : 0);
    }
    const auto rows = static_cast<Eigen::Index>(data.labels.size());
    data.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), rows, static_cast<Eigen::Index>(width));
    return data;
}

IngestStats cmd_ingest(const PipelineContext& ctx) {
    return in_stage("ingest", [&] {
        IngestStats stats;
        const auto g = load_dataset(ctx.config, &stats);
        if (!g.directed()) {
            for (const auto& a : g.arcs()) {
                if (!g.has_edge(a.dst, a.src)) throw Error("undirected graph is not symmetric");
            }
        }
        fs::create_directories(ctx.out_dir);
        const auto header = provenance(ctx, Stage::graph);
        write_graph(ctx.out_dir / artifact::graph, g, header);
        auto out = open_out(ctx.out_dir / artifact::stats);
        out << "# " << header << '\n'
            << "dataset=" << ctx.config.dataset_path.string() << '\n'
            << "directed=" << (stats.directed ? "true" : "false") << '\n'
            << "raw_edges=" << stats.raw_edges << '\n'
            << "self_loops_dropped=" << stats.self_loops << '\n'
            << "duplicates_dropped=" << stats.duplicates << '\n'
            << "nodes=" << stats.nodes << '\n'
            << "edges=" << stats.edges << '\n'
            << "weak_components=" << stats.components << '\n';
        say(ctx, "ingest: nodes=" + std::to_string(stats.nodes) + " edges=" + std::to_string(stats.edges) +
                     " (raw " + std::to_string(stats.raw_edges) + ", dropped " + std::to_string(stats.self_loops) +
                     " self-loops and " + std::to_string(stats.duplicates) + " duplicates)");
        return stats;
    });
}

SplitDataset cmd_split(const PipelineContext& ctx) {
    return in_stage("split", [&] {
        require(ctx, artifact::graph, Stage::graph);
        const auto g = read_graph(ctx.out_dir / artifact::graph);
        auto ds = assemble_dataset(g, ctx.config.test_fraction, ctx.config.split_seed());
        const auto header = provenance(ctx, Stage::split);
        write_split_file(ctx.out_dir / artifact::split_train, header, ds, ds.train);
        write_split_file(ctx.out_dir / artifact::split_test, header, ds, ds.test);
        say(ctx, "split: train=" + std::to_string(ds.train.size()) + " test=" + std::to_string(ds.test.size()) +
                     " positive_shortfall=" + std::to_string(ds.positive_shortfall) +
                     " negative_shortfall=" + std::to_string(ds.negative_shortfall));
        return ds;
    });
}

void cmd_embed(const PipelineContext& ctx) {
    in_stage("embed", [&] {
        require(ctx, artifact::graph, Stage::graph);
        const auto g = read_graph(ctx.out_dir / artifact::graph);
        const auto ds = load_split(ctx, g);
        WalkConfig walk = ctx.config.walk;
        walk.seed = ctx.config.walk_seed();
        SkipGramConfig sg = ctx.config.skipgram;
        sg.seed = ctx.config.skipgram_seed();
        sg.threads = ctx.threads;
        const auto walks = generate_walks(ds.train_graph, walk, ctx.threads);
        say(ctx, "embed: " + std::to_string(walks.size()) + " walks");
        auto result = train_skipgram(walks, g.node_count(), sg);
        write_embeddings(ctx.out_dir / artifact::embeddings, result.embedding);
        auto meta = open_out(ctx.out_dir / artifact::embeddings_meta);
        meta << "# " << provenance(ctx, Stage::embed) << '\n';
        meta.precision(10);
        for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
            meta << "epoch_loss_" << i << '=' << result.epoch_loss[i] << '\n';
        }
        say(ctx, "embed: final epoch loss " + std::to_string(result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back()));
    });
}

std::size_t cmd_features(const PipelineContext& ctx) {
    return in_stage("features", [&] {
        const auto& cfg = ctx.config;
        require(ctx, artifact::graph, Stage::graph);
        const auto g = read_graph(ctx.out_dir / artifact::graph);
        const auto ds = load_split(ctx, g);

        std::optional<EmbeddingMatrix> emb;
        if (cfg.uses_embeddings()) emb = load_embeddings(ctx, g.node_count());
        const bool hadamard = cfg.feature_mode != FeatureMode::heuristic;

        std::optional<FeatureMatrix> h_train;
        std::optional<FeatureMatrix> h_test;
        if (cfg.uses_heuristics()) {
            HeuristicConfig hc = cfg.heuristics;
            hc.svd_seed = cfg.svd_seed();
            const auto featurizer = HeuristicFeaturizer::fit(ds.train_graph, hc);
            for (const auto& w : featurizer.warnings()) say(ctx, "features: warning: " + w);
            h_train = featurize_edges(featurizer, ds.train, ctx.threads);
            h_test = featurize_edges(featurizer, ds.test, ctx.threads);
        }
        const std::size_t width = (cfg.uses_heuristics() ? kHeuristicDim : 0) + (hadamard ? emb->dim() : 0);
        say(ctx, "feature width: " + std::to_string(width));
        if (cfg.node_vectors) say(ctx, "features: plus " + std::to_string(2 * emb->dim()) + " node-vector columns");

        const auto header = provenance(ctx, Stage::features);
        const EmbeddingMatrix* e = emb ? &*emb : nullptr;
        write_feature_file(ctx.out_dir / artifact::features_train, header, ds.train, h_train ? &*h_train : nullptr,
                           e, hadamard, cfg.node_vectors);
        write_feature_file(ctx.out_dir / artifact::features_test, header, ds.test, h_test ? &*h_test : nullptr, e,
                           hadamard, cfg.node_vectors);
        return width;
    });
}

TrainResult cmd_train(const PipelineContext& ctx) {
    return in_stage("train", [&] {
        const auto& cfg = ctx.config;
        require(ctx, artifact::features_train, Stage::features);
        auto data = read_features(ctx.out_dir / artifact::features_train);

        LinkClassifier model;
        model.architecture = cfg.logistic ? std::string("logistic") : cfg.effective_architecture();
        model.options = cfg.arch_options;
        model.logistic = cfg.logistic;
        model.input_dims = data.input_dims();
        model.scaler = Standardizer::fit(data.features);
        model.scaler.apply(data.features);
        model.rebuild_spec();

        TrainConfig tc = cfg.train;
        tc.seed = cfg.train_seed();
        auto result = train(model.spec, data, tc);
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            std::ostringstream s;
            s << "train: epoch " << i << " loss " << result.history[i].train_loss << " validation_f1 "
              << result.history[i].validation_f1;
            say(ctx, s.str());
        }
        say(ctx, "train: best epoch " + std::to_string(result.best_epoch));
        model.params = result.params;
        save_classifier(ctx.out_dir / artifact::model, model, {provenance(ctx, Stage::model)});
        return result;
    });
}

Metrics cmd_eval(const PipelineContext& ctx) {
    return in_stage("eval", [&] {
        require(ctx, artifact::model, Stage::model);
        require(ctx, artifact::features_test, Stage::features);
        const auto model = load_classifier(ctx.out_dir / artifact::model);
        auto data = read_features(ctx.out_dir / artifact::features_test);
        if (data.input_dims() != model.input_dims) throw Error("test features do not match the model inputs");
        model.scaler.apply(data.features);
        const auto metrics = evaluate(model.params, model.spec, data);
        auto out = open_out(ctx.out_dir / artifact::metrics);
        out << "# linkpred stage=eval seed=" << ctx.config.seed << " config_hash=" << ctx.config.hash(Stage::model)
            << '\n';
        write_metrics(out, metrics);
        std::ostringstream s;
        s << "eval: f1=" << metrics.f1 << " precision=" << metrics.precision << " recall=" << metrics.recall;
        say(ctx, s.str());
        return metrics;
    });
}

RunReport cmd_run(const PipelineContext& ctx, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    in_stage("config", [&] { ctx.config.validate(); });
    fs::create_directories(ctx.out_dir);
    RunReport report;
    bool dirty = options.fresh;
    // Once a stage reruns, everything downstream reruns too.
    auto stage = [&](const char* name, bool reusable, auto&& body) {
        if (!dirty && reusable) {
            say(ctx, std::string(name) + ": reusing artifact");
            report.reused[name] = true;
            return;
        }
        dirty = true;
        report.reused[name] = false;
        body();
    };
    const auto& cfg = ctx.config;
    auto matches = [&](const char* file, Stage s) { return header_matches(ctx.out_dir / file, cfg.hash(s)); };

    stage("ingest", matches(artifact::graph, Stage::graph), [&] { cmd_ingest(ctx); });
    stage("split", matches(artifact::split_train, Stage::split) && matches(artifact::split_test, Stage::split),
          [&] { cmd_split(ctx); });
    if (cfg.uses_embeddings()) {
        stage("embed", matches(artifact::embeddings_meta, Stage::embed) && fs::exists(ctx.out_dir / artifact::embeddings),
              [&] { cmd_embed(ctx); });
    }
    stage("features",
          matches(artifact::features_train, Stage::features) && matches(artifact::features_test, Stage::features),
          [&] { cmd_features(ctx); });
    stage("train", matches(artifact::model, Stage::model), [&] { cmd_train(ctx); });
    report.metrics = cmd_eval(ctx);

    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto out = open_out(ctx.out_dir / artifact::runtime);
    out << "runtime_seconds=" << report.runtime_seconds << '\n';
    return report;
}

}  // namespace linkpred
