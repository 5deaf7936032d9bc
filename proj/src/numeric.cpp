#include "arnoldflow/numeric.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace arnoldflow {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

int default_workers() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

Rng instance_rng(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over (seed, index) so neighbouring indices get unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    std::seed_seq seq{static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(z >> 32),
                      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace arnoldflow
