#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace switchkit {

/**
 * Run fn(begin, end) over [0, n) split into contiguous chunks, one per
 * worker. The partition depends only on n and workers, so callers that
 * write to disjoint output slots get results independent of scheduling.
 */
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(chunks);
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = n * c / chunks;
        const std::size_t end = n * (c + 1) / chunks;
        pool.emplace_back([&, c, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Pairwise (cascade) summation; order of evaluation is fixed by the input order.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace switchkit
