#include "treelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace treelab {
namespace {

std::atomic<int> g_workers{1};
constexpr std::size_t kReduceBlock = 4096;

}  // namespace

void set_worker_count(int n) { g_workers.store(std::max(1, n)); }

int worker_count() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain) {
    if (n == 0) return;
    grain = std::max<std::size_t>(grain, 1);
    const std::size_t max_useful = (n + grain - 1) / grain;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), max_useful);
    if (workers <= 1) {
        body(0, n);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    threads.clear();
    if (failure) std::rethrow_exception(failure);
}

double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t lo = b * kReduceBlock;
            const std::size_t hi = std::min(n, lo + kReduceBlock);
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) s += f(i);
            partial[b] = s;
        }
    }, 1);
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace treelab
