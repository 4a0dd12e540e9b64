#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace aerostack {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {
inline std::atomic<std::size_t>& worker_setting() {
    static std::atomic<std::size_t> value{0};
    return value;
}
}  // namespace detail

/// Worker threads used by parallel fits. 0 means hardware concurrency.
/// Results never depend on this value.
inline void set_worker_threads(std::size_t n) { detail::worker_setting().store(n); }

inline std::size_t worker_threads() {
    const std::size_t n = detail::worker_setting().load();
    if (n > 0) return n;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
/// write results into per-index slots so assembly order is fixed.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t threads = std::min(worker_threads(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace aerostack
