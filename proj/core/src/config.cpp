#include "linkpred/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <vector>

#include "linkpred/errors.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a non-negative integer");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a boolean");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_widths(const std::vector<std::size_t>& widths) {
    std::string out;
    for (std::size_t w : widths) out += (out.empty() ? "" : ",") + std::to_string(w);
    return out;
}

std::vector<std::size_t> parse_widths(std::string_view key, std::string_view text) {
    std::vector<std::size_t> out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto part = trim(text.substr(0, comma));
        if (!part.empty()) out.push_back(static_cast<std::size_t>(to_unsigned(key, part)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

struct Field {
    const char* key;
    Stage stage;
    std::function<void(PipelineConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define LP_DOUBLE(KEY, STAGE, MEMBER)                                                                  \
    Field {                                                                                            \
        KEY, STAGE, [](PipelineConfig& c, std::string_view k, std::string_view v) { c.MEMBER = to_double(k, v); }, \
            [](const PipelineConfig& c) { return format_double(c.MEMBER); }                            \
    }
#define LP_SIZE(KEY, STAGE, MEMBER)                                                                    \
    Field {                                                                                            \
        KEY, STAGE,                                                                                    \
            [](PipelineConfig& c, std::string_view k, std::string_view v) {                            \
                c.MEMBER = static_cast<decltype(c.MEMBER)>(to_unsigned(k, v));                         \
            },                                                                                         \
            [](const PipelineConfig& c) { return std::to_string(c.MEMBER); }                           \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"dataset.path", Stage::graph,
         [](PipelineConfig& c, std::string_view, std::string_view v) { c.dataset_path = std::string(v); },
         [](const PipelineConfig& c) { return c.dataset_path.string(); }},
        {"dataset.directed", Stage::graph,
         [](PipelineConfig& c, std::string_view k, std::string_view v) { c.directed = to_bool(k, v); },
         [](const PipelineConfig& c) { return std::string(c.directed ? "true" : "false"); }},
        LP_DOUBLE("split.test_fraction", Stage::split, test_fraction),
        LP_SIZE("seed", Stage::split, seed),
        LP_DOUBLE("heuristics.pagerank_damping", Stage::features, heuristics.pagerank_damping),
        LP_DOUBLE("heuristics.pagerank_tol", Stage::features, heuristics.pagerank_tol),
        LP_DOUBLE("heuristics.katz_alpha", Stage::features, heuristics.katz_alpha),
        LP_DOUBLE("heuristics.katz_beta", Stage::features, heuristics.katz_beta),
        LP_DOUBLE("heuristics.katz_tol", Stage::features, heuristics.katz_tol),
        LP_DOUBLE("heuristics.hits_tol", Stage::features, heuristics.hits_tol),
        LP_SIZE("heuristics.max_iters", Stage::features, heuristics.max_iters),
        LP_SIZE("heuristics.svd_rank", Stage::features, heuristics.svd_rank),
        LP_DOUBLE("heuristics.missing_path_sentinel", Stage::features, heuristics.missing_path_sentinel),
        {"features.mode", Stage::features,
         [](PipelineConfig& c, std::string_view, std::string_view v) { c.feature_mode = parse_feature_mode(v); },
         [](const PipelineConfig& c) { return std::string(to_string(c.feature_mode)); }},
        {"features.node_vectors", Stage::features,
         [](PipelineConfig& c, std::string_view k, std::string_view v) { c.node_vectors = to_bool(k, v); },
         [](const PipelineConfig& c) { return std::string(c.node_vectors ? "true" : "false"); }},
        LP_SIZE("walk.walks_per_node", Stage::embed, walk.walks_per_node),
        LP_SIZE("walk.length", Stage::embed, walk.walk_length),
        LP_DOUBLE("walk.p", Stage::embed, walk.p),
        LP_DOUBLE("walk.q", Stage::embed, walk.q),
        LP_SIZE("skipgram.dim", Stage::embed, skipgram.dim),
        LP_SIZE("skipgram.window", Stage::embed, skipgram.window),
        LP_SIZE("skipgram.negatives", Stage::embed, skipgram.negatives),
        LP_DOUBLE("skipgram.initial_lr", Stage::embed, skipgram.initial_lr),
        LP_DOUBLE("skipgram.min_lr", Stage::embed, skipgram.min_lr),
        LP_SIZE("skipgram.epochs", Stage::embed, skipgram.epochs),
        LP_DOUBLE("train.learning_rate", Stage::model, train.learning_rate),
        LP_SIZE("train.batch_size", Stage::model, train.batch_size),
        LP_SIZE("train.epochs", Stage::model, train.epochs),
        LP_SIZE("train.patience", Stage::model, train.patience),
        LP_DOUBLE("train.validation_fraction", Stage::model, train.validation_fraction),
        {"model.classifier", Stage::model,
         [](PipelineConfig& c, std::string_view k, std::string_view v) {
             if (v == "nn") c.logistic = false;
             else if (v == "logistic") c.logistic = true;
             else throw Error("config key '" + std::string(k) + "': expected nn or logistic");
         },
         [](const PipelineConfig& c) { return std::string(c.logistic ? "logistic" : "nn"); }},
        {"model.arch", Stage::model,
         [](PipelineConfig& c, std::string_view, std::string_view v) { c.architecture = std::string(v); },
         [](const PipelineConfig& c) { return c.architecture; }},
        {"model.activation", Stage::model,
         [](PipelineConfig& c, std::string_view, std::string_view v) { c.arch_options.activation = parse_activation(v); },
         [](const PipelineConfig& c) { return std::string(to_string(c.arch_options.activation)); }},
        LP_SIZE("model.tower_width", Stage::model, arch_options.tower_width),
        {"model.head", Stage::model,
         [](PipelineConfig& c, std::string_view k, std::string_view v) { c.arch_options.head_widths = parse_widths(k, v); },
         [](const PipelineConfig& c) { return format_widths(c.arch_options.head_widths); }},
    };
    return table;
}

#undef LP_DOUBLE
#undef LP_SIZE

bool stage_depends_on(const PipelineConfig& c, Stage stage, Stage field_stage) {
    if (field_stage == Stage::embed) {
        // Embedding keys reach features/model only when embeddings are used.
        return stage == Stage::embed || (stage > Stage::embed && c.uses_embeddings());
    }
    if (field_stage == Stage::features && stage == Stage::embed) return false;
    return field_stage <= stage;
}

}  // namespace

std::string_view to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::heuristic: return "heuristic";
        case FeatureMode::embedding: return "embedding";
        case FeatureMode::combined: return "combined";
    }
    return "heuristic";
}

FeatureMode parse_feature_mode(std::string_view name) {
    if (name == "heuristic") return FeatureMode::heuristic;
    if (name == "embedding") return FeatureMode::embedding;
    if (name == "combined") return FeatureMode::combined;
    throw Error("unknown feature mode '" + std::string(name) + "' (expected heuristic, embedding or combined)");
}

PipelineConfig PipelineConfig::parse(std::istream& in) {
    PipelineConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view[0] == '#') continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
        try {
            c.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    auto c = parse(in);
    // Relative dataset paths resolve against the config file's directory.
    if (!c.dataset_path.empty() && c.dataset_path.is_relative()) {
        c.dataset_path = (path.parent_path() / c.dataset_path).lexically_normal();
    }
    return c;
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
    for (const auto& f : fields()) {
        if (key == f.key) {
            f.set(*this, key, value);
            return;
        }
    }
    throw Error("unknown config key '" + std::string(key) + "'");
}

void PipelineConfig::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("split.test_fraction must lie in (0, 1)");
    heuristics.validate();
    if (heuristics.svd_rank != 6) throw Error("heuristics.svd_rank must be 6 for the 56-slot feature layout");
    walk.validate();
    skipgram.validate();
    train.validate();
    if (arch_options.tower_width == 0) throw Error("model.tower_width must be positive");
}

std::string PipelineConfig::effective_architecture() const {
    if (!architecture.empty()) return architecture;
    switch (feature_mode) {
        case FeatureMode::heuristic: return "H";
        case FeatureMode::embedding: return "R";
        case FeatureMode::combined: return "H | R";
    }
    return "H";
}

std::map<std::string, std::string> PipelineConfig::entries() const {
    std::map<std::string, std::string> out;
    for (const auto& f : fields()) out[f.key] = f.get(*this);
    return out;
}

std::string PipelineConfig::hash(Stage stage) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    };
    std::map<std::string, std::string> selected;
    for (const auto& f : fields()) {
        if (stage_depends_on(*this, stage, f.stage)) selected[f.key] = f.get(*this);
    }
    for (const auto& [k, v] : selected) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t PipelineConfig::svd_seed() const noexcept { return derive_seed(seed, 0x737664); }
std::uint64_t PipelineConfig::walk_seed() const noexcept { return derive_seed(seed, 0x77616c6b); }
std::uint64_t PipelineConfig::skipgram_seed() const noexcept { return derive_seed(seed, 0x736b6970); }
std::uint64_t PipelineConfig::train_seed() const noexcept { return derive_seed(seed, 0x747261696e); }

}  // namespace linkpred
