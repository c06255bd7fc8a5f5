#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace linkpred::detail {

/// Splits [0, count) into contiguous chunks and runs `work(begin, end)` for
/// each on its own thread. The first worker exception is rethrown after all
/// workers have joined.
template <class Work>
void parallel_chunks(std::size_t count, unsigned threads, Work&& work) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, count));
    if (workers == 1) {
        work(std::size_t{0}, count);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin >= end) continue;
            pool.emplace_back([&work, &errors, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace linkpred::detail
