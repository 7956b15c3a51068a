#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ionloss::detail
{
// Run body(i) for i in [0, count) on up to `threads` workers. Each index is
// processed exactly once; results must be written to per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown.
template<class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    std::size_t const workers
        = std::min<std::size_t>(count, threads > 1 ? std::size_t(threads) : 1);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back(run);
    }
    pool.clear();
    if (failure)
    {
        std::rethrow_exception(failure);
    }
}
}  // namespace ionloss::detail
