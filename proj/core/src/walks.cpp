#include <algorithm>
#include <numeric>

#include "linkpred/embeddings.hpp"
#include "linkpred/errors.hpp"
#include "parallel.hpp"

namespace linkpred {

namespace {

constexpr std::uint64_t kOrderStream = 0x6f72646572;  // "order"
constexpr std::uint64_t kWalkStream = 0x77616c6b;     // "walk"

}  // namespace

void WalkConfig::validate() const {
    if (!(p > 0.0 && q > 0.0)) throw Error("walk p and q must be positive");
    if (walk_length < 2) throw Error("walk length must be at least 2");
    if (walks_per_node < 1) throw Error("walks_per_node must be at least 1");
}

std::optional<NodeId> next_step(const DiGraph& g, std::optional<NodeId> previous, NodeId current, double p,
                                double q, Rng& rng) {
    const auto candidates = g.out_neighbors(current);
    if (candidates.empty()) return std::nullopt;
    if (!previous) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return candidates[pick(rng)];
    }

    // Weights follow the candidate order; previous's sorted out-list is merged
    // alongside to classify candidates at distance 1 from it.
    thread_local std::vector<double> cumulative;
    cumulative.resize(candidates.size());
    const double w_return = 1.0 / p;
    const double w_outward = 1.0 / q;
    const auto prev_out = g.out_neighbors(*previous);
    auto it = prev_out.begin();
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const NodeId x = candidates[i];
        double w = 1.0;
        if (x == *previous) {
            w = w_return;
        } else if (w_outward != 1.0) {
            while (it != prev_out.end() && *it < x) ++it;
            if (it == prev_out.end() || *it != x) w = w_outward;
        }
        total += w;
        cumulative[i] = total;
    }

    std::uniform_real_distribution<double> uniform(0.0, total);
    const double target = uniform(rng);
    auto chosen = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (chosen == cumulative.end()) return candidates.back();
    return candidates[static_cast<std::size_t>(chosen - cumulative.begin())];
}

std::vector<Walk> generate_walks(const DiGraph& g, const WalkConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::size_t n = g.node_count();
    std::vector<Walk> walks(cfg.walks_per_node * n);
    std::vector<NodeId> starts(walks.size());
    for (std::size_t round = 0; round < cfg.walks_per_node; ++round) {
        auto first = starts.begin() + static_cast<std::ptrdiff_t>(round * n);
        std::iota(first, first + static_cast<std::ptrdiff_t>(n), NodeId{0});
        Rng order = make_rng(cfg.seed, kOrderStream + round);
        std::shuffle(first, first + static_cast<std::ptrdiff_t>(n), order);
    }

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = make_rng(derive_seed(cfg.seed, kWalkStream), i);
            Walk& walk = walks[i];
            walk.reserve(cfg.walk_length);
            walk.push_back(starts[i]);
            std::optional<NodeId> previous;
            while (walk.size() < cfg.walk_length) {
                auto next = next_step(g, previous, walk.back(), cfg.p, cfg.q, rng);
                if (!next) break;
                previous = walk.back();
                walk.push_back(*next);
            }
        }
    };

    detail::parallel_chunks(walks.size(), threads, work);
    return walks;
}

}  // namespace linkpred
