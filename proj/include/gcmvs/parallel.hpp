#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace gcmvs {

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are
/// disjoint, so bodies writing only to their own index range produce results
/// independent of the thread count. The first exception thrown by any chunk
/// is rethrown on the caller's thread.
template <class Body>
void parallel_for(std::int64_t count, int threads, Body&& body)
{
    if (count <= 0)
        return;
    const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, count);
    if (workers == 1) {
        body(std::int64_t{0}, count);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (count + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                if (begin < end)
                    body(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace gcmvs
