#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "linkpred/embeddings.hpp"
#include "linkpred/errors.hpp"
#include "parallel.hpp"

namespace linkpred {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;  // "nois"
constexpr double kUnigramPower = 0.75;

// Element access policies: plain for the single-threaded path, relaxed
// atomics for Hogwild workers sharing the parameter arrays.
struct PlainAccess {
    static float load(const float& x) { return x; }
    static void add(float& x, float delta) { x += delta; }
};

struct RelaxedAccess {
    static float load(const float& x) { return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed); }
    static void add(float& x, float delta) {
        std::atomic_ref<float> ref(x);
        ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
    }
};

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Shared {
    EmbeddingMatrix& model;
    std::span<const Walk> walks;
    const SkipGramConfig& cfg;
    const std::discrete_distribution<NodeId>& noise;
    double total_centres;
};

struct Progress {
    double loss = 0.0;
    std::size_t pairs = 0;
};

// One pass over walks[begin, end). `done` counts centre tokens processed
// before this shard in the global schedule and drives the learning rate.
template <class Access>
Progress train_shard(Shared& s, std::size_t begin, std::size_t end, double done, Rng& rng) {
    const std::size_t dim = s.model.dim();
    const auto window = static_cast<std::ptrdiff_t>(s.cfg.window);
    std::discrete_distribution<NodeId> noise = s.noise;
    std::vector<float> grad(dim);
    Progress p;
    for (std::size_t w = begin; w < end; ++w) {
        const Walk& walk = s.walks[w];
        const auto len = static_cast<std::ptrdiff_t>(walk.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            const double progress = done / s.total_centres;
            const double lr = s.cfg.initial_lr + (s.cfg.min_lr - s.cfg.initial_lr) * progress;
            done += 1.0;
            auto centre = s.model.row(walk[static_cast<std::size_t>(i)]);
            for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - window); j <= std::min(len - 1, i + window); ++j) {
                if (j == i) continue;
                const NodeId context = walk[static_cast<std::size_t>(j)];
                std::fill(grad.begin(), grad.end(), 0.0f);
                for (std::size_t d = 0; d <= s.cfg.negatives; ++d) {
                    NodeId target = context;
                    double label = 1.0;
                    if (d > 0) {
                        target = noise(rng);
                        if (target == context) continue;
                        label = 0.0;
                    }
                    auto out = s.model.context_row(target);
                    double dot = 0.0;
                    for (std::size_t k = 0; k < dim; ++k) dot += Access::load(centre[k]) * Access::load(out[k]);
                    p.loss -= label > 0.0 ? log_sigmoid(dot) : log_sigmoid(-dot);
                    const auto g = static_cast<float>((label - sigmoid(dot)) * lr);
                    for (std::size_t k = 0; k < dim; ++k) {
                        grad[k] += g * Access::load(out[k]);
                        Access::add(out[k], g * Access::load(centre[k]));
                    }
                }
                for (std::size_t k = 0; k < dim; ++k) Access::add(centre[k], grad[k]);
                ++p.pairs;
            }
        }
    }
    return p;
}

}  // namespace

void SkipGramConfig::validate() const {
    if (dim < 1 || window < 1 || negatives < 1 || epochs < 1) {
        throw Error("skip-gram dim, window, negatives and epochs must be at least 1");
    }
    if (!(initial_lr > 0.0 && min_lr > 0.0)) throw Error("skip-gram learning rates must be positive");
    if (threads < 1) throw Error("skip-gram needs at least one thread");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t nodes, std::size_t dim)
    : nodes_(nodes), dim_(dim), vectors_(nodes * dim, 0.0f), context_(nodes * dim, 0.0f) {}

SkipGramResult train_skipgram(std::span<const Walk> walks, std::size_t node_count, const SkipGramConfig& cfg) {
    cfg.validate();
    if (walks.empty()) throw Error("skip-gram corpus is empty");

    std::vector<double> counts(node_count, 0.0);
    double tokens = 0.0;
    for (const Walk& walk : walks) {
        for (NodeId u : walk) {
            if (u >= node_count) throw Error("walk references node outside the graph");
            counts[u] += 1.0;
        }
        tokens += static_cast<double>(walk.size());
    }
    for (double& c : counts) c = std::pow(c, kUnigramPower);
    const std::discrete_distribution<NodeId> noise(counts.begin(), counts.end());

    SkipGramResult result{EmbeddingMatrix(node_count, cfg.dim), {}};
    EmbeddingMatrix& model = result.embedding;
    {
        Rng init = make_rng(cfg.seed, kInitStream);
        const double bound = 0.5 / static_cast<double>(cfg.dim);
        std::uniform_real_distribution<double> uniform(-bound, bound);
        for (float& x : model.vectors()) x = static_cast<float>(uniform(init));
    }

    Shared shared{model, walks, cfg, noise, tokens * static_cast<double>(cfg.epochs)};
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double epoch_start = tokens * static_cast<double>(epoch);
        Progress total;
        if (cfg.threads == 1) {
            Rng rng = make_rng(cfg.seed, kNoiseStream + epoch);
            total = train_shard<PlainAccess>(shared, 0, walks.size(), epoch_start, rng);
        } else {
            std::vector<Progress> parts(cfg.threads);
            std::vector<double> shard_start(walks.size() + 1, 0.0);
            for (std::size_t w = 0; w < walks.size(); ++w) {
                shard_start[w + 1] = shard_start[w] + static_cast<double>(walks[w].size());
            }
            const std::size_t chunk = (walks.size() + cfg.threads - 1) / cfg.threads;
            detail::parallel_chunks(walks.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
                const std::size_t worker = begin / chunk;
                Rng rng = make_rng(derive_seed(cfg.seed, kNoiseStream + epoch), worker);
                // Shards run concurrently, so each is scheduled as if it started
                // at its proportional offset into the epoch.
                parts[worker] = train_shard<RelaxedAccess>(shared, begin, end, epoch_start + shard_start[begin], rng);
            });
            for (const Progress& p : parts) {
                total.loss += p.loss;
                total.pairs += p.pairs;
            }
        }
        result.epoch_loss.push_back(total.pairs ? total.loss / static_cast<double>(total.pairs) : 0.0);
    }
    model.discard_context();
    return result;
}

std::vector<double> edge_embedding(const EmbeddingMatrix& e, NodeId u, NodeId v) {
    if (u >= e.nodes() || v >= e.nodes()) throw Error("edge_embedding: node id out of range");
    auto a = e.row(u);
    auto b = e.row(v);
    std::vector<double> out(e.dim());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(a[k]) * static_cast<double>(b[k]);
    return out;
}

std::vector<double> combine_features(const HeuristicVector& h, std::span<const double> r, std::size_t declared_dim) {
    if (r.size() != declared_dim) {
        throw Error("representation has " + std::to_string(r.size()) + " entries, expected " +
                    std::to_string(declared_dim));
    }
    std::vector<double> out(h.begin(), h.end());
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& e) {
    out << e.nodes() << ' ' << e.dim() << '\n';
    std::ostringstream line;
    line.precision(9);
    for (NodeId u = 0; u < e.nodes(); ++u) {
        line.str({});
        line << u;
        for (float x : e.row(u)) line << ' ' << x;
        out << line.str() << '\n';
    }
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& e) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write embeddings to '" + path.string() + "'");
    write_embeddings(out, e);
}

EmbeddingMatrix read_embeddings(std::istream& in) {
    std::size_t nodes = 0;
    std::size_t dim = 0;
    if (!(in >> nodes >> dim)) throw ParseError(1, "expected header `N dim`");
    EmbeddingMatrix e(nodes, dim);
    e.discard_context();
    std::vector<bool> seen(nodes, false);
    for (std::size_t line = 0; line < nodes; ++line) {
        std::size_t id = 0;
        if (!(in >> id) || id >= nodes || seen[id]) throw ParseError(line + 2, "bad or repeated node id");
        seen[id] = true;
        for (float& x : e.row(static_cast<NodeId>(id))) {
            if (!(in >> x) || !std::isfinite(x)) throw ParseError(line + 2, "expected " + std::to_string(dim) + " finite values");
        }
    }
    return e;
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embeddings '" + path.string() + "'");
    return read_embeddings(in);
}

}  // namespace linkpred
