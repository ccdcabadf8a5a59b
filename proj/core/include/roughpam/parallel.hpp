#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roughpam {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(batch) for batch in [0, n_batches) on up to `threads` workers.
// Each batch must write only to its own output slot; callers merge the slots
// in batch order afterwards, which keeps results independent of scheduling.
template <class Body>
void for_each_batch(std::int64_t n_batches, int threads, Body&& body) {
    const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), n_batches));
    if (workers <= 1) {
        for (std::int64_t b = 0; b < n_batches; ++b) body(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t b = next.fetch_add(1);
                if (b >= n_batches) return;
                try {
                    body(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(n_batches);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Splits n items into batches of at most batch_size; returns [begin, end) of batch b.
struct BatchPlan {
    std::int64_t total;
    std::int64_t batch_size;

    std::int64_t count() const { return (total + batch_size - 1) / batch_size; }
    std::int64_t begin(std::int64_t b) const { return b * batch_size; }
    std::int64_t end(std::int64_t b) const { return std::min(total, (b + 1) * batch_size); }
};

}  // namespace roughpam
